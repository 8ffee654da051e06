#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "champ/bma.hpp"
#include "champ/dataset.hpp"
#include "champ/training.hpp"
#include "champ/uncertainty.hpp"

namespace champ {

/// Environment variable that overrides data.mnist.dir.
inline constexpr const char* kDataDirEnv = "CHAMP_DATA_DIR";

struct SyntheticDataConfig {
  int classes = 10;
  int per_class_train = 100;
  int per_class_test = 50;
  int dim = 8;
  double noise = 0.1;
  std::optional<std::uint64_t> seed;  // defaults to one derived from the run seed
};

struct MnistDataConfig {
  std::filesystem::path dir;
  std::string train_images = "train-images-idx3-ubyte";
  std::string train_labels = "train-labels-idx1-ubyte";
  std::string test_images = "t10k-images-idx3-ubyte";
  std::string test_labels = "t10k-labels-idx1-ubyte";
  std::size_t train_limit = 0;  // 0 = all
  std::size_t test_limit = 0;
};

struct DataConfig {
  enum class Source { synthetic, mnist } source = Source::synthetic;
  SyntheticDataConfig synthetic;
  MnistDataConfig mnist;
};

struct ModelConfig {
  std::vector<int> dims = {8, 16, 10};
  int class_count = 10;
  double bias = -0.1;
};

/// Accuracy floor either absolute or as a drop from the unpruned accuracy.
struct AccuracyFloor {
  std::optional<double> absolute;
  double drop = 0.05;

  double resolve(double baseline) const { return absolute ? *absolute : baseline - drop; }
};

struct OneShotSection {
  std::vector<double> alphas = {1.0, 1.5, 2.0};
  AccuracyFloor acc_min;
  TrainConfig finetune;
};

struct IterativeSection {
  std::optional<double> alpha0;
  double delta_alpha = 0.2;
  AccuracyFloor acc_min;
  TrainConfig finetune;
  int max_iters = 50;
};

struct UncertaintySection {
  std::vector<double> sigmas = kDefaultSigmaSweep;
  int iterations = 1000;
  std::vector<GatingMode> modes = {GatingMode::power_gated, GatingMode::removed};
};

struct ReportSection {
  int histogram_bins = 64;
};

/// Every setting of an experiment in one JSON document. Unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  DataConfig data;
  ModelConfig model;
  TrainConfig train;
  OneShotSection oneshot;
  IterativeSection iterative;
  UncertaintySection uncertainty;
  BmaConfig bma;
  ReportSection report;
};

/// Throws ConfigError on syntax errors, unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies CLI overrides (seed, workers) and the data-directory environment
/// variable, then re-validates.
void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> workers);

void validate_config(const ExperimentConfig& cfg);

struct DataSplits {
  Dataset train;
  Dataset test;
};

/// Builds or loads the configured datasets. Throws DataError when files are
/// missing or malformed.
DataSplits load_data(const ExperimentConfig& cfg);

}  // namespace champ
