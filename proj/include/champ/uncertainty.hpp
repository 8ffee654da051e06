#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "champ/dataset.hpp"
#include "champ/mask.hpp"
#include "champ/network.hpp"

namespace champ {

/// power_gated: pruned phase shifters stay in the circuit at zero drive and
/// still see noise. removed: pruned phase shifters are physically absent.
enum class GatingMode { power_gated, removed };

std::string to_string(GatingMode mode);
GatingMode gating_mode_from_string(const std::string& s);

struct UncertaintyConfig {
  double sigma_ps = 0.0;  // noise std in units of π
  int iterations = 1000;
  GatingMode mode = GatingMode::power_gated;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct McResult {
  double sigma_ps = 0.0;
  GatingMode mode = GatingMode::power_gated;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over iterations
  int iterations = 0;

  double standard_error() const;
};

/// Adds independent N(0, (σ_PS·π)²) noise to every eligible phase and re-wraps.
/// Gains are never perturbed. Throws std::invalid_argument on a misaligned mask.
ScIpnn perturb(const ScIpnn& net, const PruneMask& mask, double sigma_ps, GatingMode mode,
               std::mt19937_64& rng);

/// Accuracy statistics over cfg.iterations perturbed copies. Iteration i draws
/// from a stream seeded by (cfg.seed, i), so results do not depend on cfg.workers.
McResult monte_carlo_accuracy(const ScIpnn& net, const PruneMask& mask, const Dataset& data,
                              const UncertaintyConfig& cfg);

inline const std::vector<double> kDefaultSigmaSweep = {0.0, 0.02, 0.05, 0.1, 0.2};

}  // namespace champ
