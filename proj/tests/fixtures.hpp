#pragma once

#include <vector>

#include "champ/dataset.hpp"
#include "champ/network.hpp"
#include "champ/training.hpp"

namespace champ::test {

/// Small trained classifier shared by the pruning and noise tests.
struct TrainedToy {
  Dataset train;
  Dataset eval;
  ScIpnn net;
  double accuracy = 0.0;
};

inline const TrainedToy& trained_toy() {
  static const TrainedToy toy = [] {
    TrainedToy t;
    const Dataset all = synth_dataset(4, 60, 4, 11, 0.15);
    const std::size_t n_train = 4 * 40;
    t.train.features.assign(all.features.begin(), all.features.begin() + n_train);
    t.train.labels.assign(all.labels.begin(), all.labels.begin() + n_train);
    t.eval.features.assign(all.features.begin() + n_train, all.features.end());
    t.eval.labels.assign(all.labels.begin() + n_train, all.labels.end());
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 2;
    t.net = train(make_network(std::vector<int>{4, 8, 4}, 4, kDefaultBias, 5), t.train, cfg).net;
    t.accuracy = evaluate(t.net, t.eval);
    return t;
  }();
  return toy;
}

inline TrainConfig short_finetune() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 9;
  return cfg;
}

}  // namespace champ::test
