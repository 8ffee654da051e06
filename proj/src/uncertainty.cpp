#include "champ/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

#include "champ/parallel.hpp"
#include "champ/phase.hpp"
#include "champ/rng.hpp"

namespace champ {

std::string to_string(GatingMode mode) {
  return mode == GatingMode::power_gated ? "power_gated" : "removed";
}

GatingMode gating_mode_from_string(const std::string& s) {
  if (s == "power_gated") return GatingMode::power_gated;
  if (s == "removed") return GatingMode::removed;
  throw std::invalid_argument("unknown gating mode '" + s + "'");
}

double McResult::standard_error() const {
  return iterations > 0 ? std_accuracy / std::sqrt(static_cast<double>(iterations)) : 0.0;
}

ScIpnn perturb(const ScIpnn& net, const PruneMask& mask, double sigma_ps, GatingMode mode,
               std::mt19937_64& rng) {
  if (!(sigma_ps >= 0.0)) throw std::invalid_argument("perturb: sigma_ps must be >= 0");
  auto phases = phase_vector(net);
  if (mask.size() != phases.size()) {
    throw std::invalid_argument("perturb: mask length does not match the phase count");
  }
  if (sigma_ps == 0.0) return net;
  std::normal_distribution<double> noise(0.0, sigma_ps * kPi);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (mode == GatingMode::removed && mask.bits[i] == 0) continue;
    phases[i] = wrap_phase(phases[i] + noise(rng));
  }
  ScIpnn out = net;
  set_phase_vector(out, phases);
  return out;
}

McResult monte_carlo_accuracy(const ScIpnn& net, const PruneMask& mask, const Dataset& data,
                              const UncertaintyConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("monte_carlo_accuracy: empty dataset");
  if (cfg.iterations < 1) throw std::invalid_argument("monte_carlo_accuracy: iterations must be >= 1");
  if (!(cfg.sigma_ps >= 0.0)) throw std::invalid_argument("monte_carlo_accuracy: sigma_ps must be >= 0");
  if (mask.size() != net.phase_count()) {
    throw std::invalid_argument("monte_carlo_accuracy: mask length does not match the phase count");
  }

  std::vector<double> acc(static_cast<std::size_t>(cfg.iterations));
  parallel_for(acc.size(), cfg.workers, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, i));
    acc[i] = evaluate(perturb(net, mask, cfg.sigma_ps, cfg.mode, rng), data);
  });

  McResult r;
  r.sigma_ps = cfg.sigma_ps;
  r.mode = cfg.mode;
  r.iterations = cfg.iterations;
  // Offset by the first sample so identical accuracies average to exactly that value.
  double offset_sum = 0.0;
  for (double a : acc) offset_sum += a - acc.front();
  r.mean_accuracy = acc.front() + offset_sum / static_cast<double>(acc.size());
  if (acc.size() > 1) {
    double ss = 0.0;
    for (double a : acc) ss += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.std_accuracy = std::sqrt(ss / static_cast<double>(acc.size() - 1));
  }
  return r;
}

}  // namespace champ
