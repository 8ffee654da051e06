#pragma once

namespace champ {

/// Maps any finite angle onto its representative in (−π, π].
/// Throws std::invalid_argument on NaN or infinity.
double wrap_phase(double x);

}  // namespace champ
