#include "champ/phase.hpp"

#include <cmath>
#include <stdexcept>

#include "champ/linalg.hpp"

namespace champ {

double wrap_phase(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("wrap_phase: non-finite angle");
  if (x > -kPi && x <= kPi) return x;
  double r = std::remainder(x, 2.0 * kPi);  // [-π, π]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace champ
