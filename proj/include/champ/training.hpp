#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "champ/dataset.hpp"
#include "champ/mask.hpp"
#include "champ/network.hpp"

namespace champ {

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 5;
  int batch_size = 16;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double momentum = 0.0;
  bool train_gains = true;  // false freezes σ
  double clip_norm = 5.0;   // batch gradient norm cap, 0 disables
};

/// Throws std::invalid_argument when a field is out of range.
void validate_train_config(const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;      // full-data loss after the epoch
  double accuracy = 0.0;  // full-data accuracy after the epoch
};

struct TrainResult {
  ScIpnn net;
  std::vector<EpochRecord> history;
};

/// Mini-batch SGD in the phase domain. Phases whose mask bit is 0 are never
/// written; updated phases are re-wrapped to (−π, π]. Activation biases stay fixed.
/// Throws std::invalid_argument on an empty dataset or a misaligned mask, and
/// NumericError when a gradient stops being finite.
TrainResult train(ScIpnn net, const Dataset& data, const TrainConfig& cfg,
                  const std::optional<PruneMask>& mask = std::nullopt);

}  // namespace champ
