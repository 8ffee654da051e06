#include "champ/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "champ/errors.hpp"
#include "champ/phase.hpp"

namespace champ {

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
  if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw std::invalid_argument("train: momentum must be in [0, 1)");
  }
  if (!(cfg.clip_norm >= 0.0)) throw std::invalid_argument("train: clip_norm must be >= 0");
}

TrainResult train(ScIpnn net, const Dataset& data, const TrainConfig& cfg,
                  const std::optional<PruneMask>& mask) {
  validate_train_config(cfg);
  validate_network(net);
  validate_dataset(data);
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (mask && mask->size() != net.phase_count()) {
    throw std::invalid_argument("train: mask length does not match the phase count");
  }

  ParamVector params = get_params(net);
  std::vector<double> velocity(params.phase_count + params.gain_count, 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      ParamVector grad = phase_gradients(net, data, batch);
      double norm2 = 0.0;
      for (std::size_t i = 0; i < params.phase_count + params.gain_count; ++i) {
        const bool frozen = i < params.phase_count ? (mask && mask->bits[i] == 0) : !cfg.train_gains;
        if (!frozen) norm2 += grad.values[i] * grad.values[i];
      }
      if (!std::isfinite(norm2)) throw NumericError("train: non-finite gradient, lower the learning rate");
      if (cfg.clip_norm > 0.0 && norm2 > cfg.clip_norm * cfg.clip_norm) {
        const double scale = cfg.clip_norm / std::sqrt(norm2);
        for (auto& g : grad.values) g *= scale;
      }

      for (std::size_t i = 0; i < params.phase_count; ++i) {
        if (mask && mask->bits[i] == 0) continue;
        velocity[i] = cfg.momentum * velocity[i] + grad.values[i];
        params.values[i] = wrap_phase(params.values[i] - cfg.learning_rate * velocity[i]);
      }
      if (cfg.train_gains) {
        for (std::size_t i = params.phase_count; i < params.phase_count + params.gain_count; ++i) {
          velocity[i] = cfg.momentum * velocity[i] + grad.values[i];
          params.values[i] -= cfg.learning_rate * velocity[i];
        }
      }
      set_params(net, params);
    }
    result.history.push_back({epoch, loss(net, data), evaluate(net, data)});
  }
  result.net = std::move(net);
  return result;
}

}  // namespace champ
