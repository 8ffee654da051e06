#include "champ/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <set>

#include "champ/checkpoint.hpp"
#include "champ/errors.hpp"
#include "champ/rng.hpp"
#include "json.hpp"

namespace champ {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  require_object(j, ctx);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& ctx) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(ctx + "." + key + ": wrong type");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, ctx);
  out = v;
}

TrainConfig parse_train(const json& j, TrainConfig t, const std::string& ctx) {
  check_keys(j, {"learning_rate", "epochs", "batch_size", "shuffle", "momentum", "train_gains", "clip_norm"}, ctx);
  read(j, "learning_rate", t.learning_rate, ctx);
  read(j, "epochs", t.epochs, ctx);
  read(j, "batch_size", t.batch_size, ctx);
  read(j, "shuffle", t.shuffle, ctx);
  read(j, "momentum", t.momentum, ctx);
  read(j, "train_gains", t.train_gains, ctx);
  read(j, "clip_norm", t.clip_norm, ctx);
  return t;
}

AccuracyFloor parse_floor(const json& j, const std::string& ctx) {
  AccuracyFloor f;
  read_opt(j, "acc_min", f.absolute, ctx);
  read(j, "acc_min_drop", f.drop, ctx);
  if (j.contains("acc_min") && j.contains("acc_min_drop")) {
    throw ConfigError(ctx + ": give either acc_min or acc_min_drop, not both");
  }
  return f;
}

void parse_data(const json& j, DataConfig& d) {
  check_keys(j, {"source", "synthetic", "mnist"}, "data");
  std::string source = "synthetic";
  read(j, "source", source, "data");
  if (source == "synthetic") {
    d.source = DataConfig::Source::synthetic;
  } else if (source == "mnist") {
    d.source = DataConfig::Source::mnist;
  } else {
    throw ConfigError("data.source: expected 'synthetic' or 'mnist'");
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    const std::string ctx = "data.synthetic";
    check_keys(s, {"classes", "per_class_train", "per_class_test", "dim", "noise", "seed"}, ctx);
    read(s, "classes", d.synthetic.classes, ctx);
    read(s, "per_class_train", d.synthetic.per_class_train, ctx);
    read(s, "per_class_test", d.synthetic.per_class_test, ctx);
    read(s, "dim", d.synthetic.dim, ctx);
    read(s, "noise", d.synthetic.noise, ctx);
    read_opt(s, "seed", d.synthetic.seed, ctx);
  }
  if (j.contains("mnist")) {
    const auto& m = j["mnist"];
    const std::string ctx = "data.mnist";
    check_keys(m, {"dir", "train_images", "train_labels", "test_images", "test_labels", "train_limit", "test_limit"},
               ctx);
    std::string dir;
    read(m, "dir", dir, ctx);
    d.mnist.dir = dir;
    read(m, "train_images", d.mnist.train_images, ctx);
    read(m, "train_labels", d.mnist.train_labels, ctx);
    read(m, "test_images", d.mnist.test_images, ctx);
    read(m, "test_labels", d.mnist.test_labels, ctx);
    read(m, "train_limit", d.mnist.train_limit, ctx);
    read(m, "test_limit", d.mnist.test_limit, ctx);
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate_train_section(const TrainConfig& t, const std::string& ctx) {
  try {
    validate_train_config(t);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

// Per-stage RNG seeds come from the run seed.
void derive_stage_seeds(ExperimentConfig& cfg) {
  cfg.train.seed = derive_seed(cfg.seed, 1);
  cfg.oneshot.finetune.seed = derive_seed(cfg.seed, 2);
  cfg.iterative.finetune.seed = derive_seed(cfg.seed, 3);
  cfg.bma.seed = derive_seed(cfg.seed, 4);
  cfg.bma.workers = cfg.workers;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"seed", "workers", "data", "model", "train", "oneshot", "iterative", "uncertainty", "bma", "report"},
             "config");
  ExperimentConfig cfg;
  read(j, "seed", cfg.seed, "config");
  read(j, "workers", cfg.workers, "config");
  if (j.contains("data")) parse_data(j["data"], cfg.data);
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, {"dims", "class_count", "bias"}, "model");
    read(m, "dims", cfg.model.dims, "model");
    read(m, "class_count", cfg.model.class_count, "model");
    read(m, "bias", cfg.model.bias, "model");
  }
  if (j.contains("train")) cfg.train = parse_train(j["train"], cfg.train, "train");
  if (j.contains("oneshot")) {
    const auto& o = j["oneshot"];
    check_keys(o, {"alphas", "acc_min", "acc_min_drop", "finetune"}, "oneshot");
    read(o, "alphas", cfg.oneshot.alphas, "oneshot");
    cfg.oneshot.acc_min = parse_floor(o, "oneshot");
    if (o.contains("finetune")) cfg.oneshot.finetune = parse_train(o["finetune"], cfg.oneshot.finetune, "oneshot.finetune");
  }
  if (j.contains("iterative")) {
    const auto& it = j["iterative"];
    check_keys(it, {"alpha0", "delta_alpha", "acc_min", "acc_min_drop", "finetune", "max_iters"}, "iterative");
    read_opt(it, "alpha0", cfg.iterative.alpha0, "iterative");
    read(it, "delta_alpha", cfg.iterative.delta_alpha, "iterative");
    cfg.iterative.acc_min = parse_floor(it, "iterative");
    read(it, "max_iters", cfg.iterative.max_iters, "iterative");
    if (it.contains("finetune")) {
      cfg.iterative.finetune = parse_train(it["finetune"], cfg.iterative.finetune, "iterative.finetune");
    }
  }
  if (j.contains("uncertainty")) {
    const auto& u = j["uncertainty"];
    check_keys(u, {"sigmas", "iterations", "modes"}, "uncertainty");
    read(u, "sigmas", cfg.uncertainty.sigmas, "uncertainty");
    read(u, "iterations", cfg.uncertainty.iterations, "uncertainty");
    if (u.contains("modes")) {
      std::vector<std::string> names;
      read(u, "modes", names, "uncertainty");
      cfg.uncertainty.modes.clear();
      for (const auto& n : names) {
        try {
          cfg.uncertainty.modes.push_back(gating_mode_from_string(n));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("uncertainty.modes: ") + e.what());
        }
      }
    }
  }
  if (j.contains("bma")) {
    const auto& b = j["bma"];
    check_keys(b, {"dims", "samples_per_dim", "sw_range", "zero_tol"}, "bma");
    read(b, "dims", cfg.bma.dims, "bma");
    read(b, "samples_per_dim", cfg.bma.samples_per_dim, "bma");
    read(b, "zero_tol", cfg.bma.zero_tol, "bma");
    if (b.contains("sw_range")) {
      std::vector<double> r;
      read(b, "sw_range", r, "bma");
      if (r.size() != 2) throw ConfigError("bma.sw_range: expected [low, high]");
      cfg.bma.sw_low = r[0];
      cfg.bma.sw_high = r[1];
    }
  }
  if (j.contains("report")) {
    const auto& r = j["report"];
    check_keys(r, {"histogram_bins"}, "report");
    read(r, "histogram_bins", cfg.report.histogram_bins, "report");
  }
  apply_overrides(cfg, std::nullopt, std::nullopt);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> workers) {
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) cfg.data.mnist.dir = dir;
  derive_stage_seeds(cfg);
  validate_config(cfg);
}

void validate_config(const ExperimentConfig& cfg) {
  require(cfg.workers >= 1, "workers must be >= 1");
  const auto& s = cfg.data.synthetic;
  require(s.classes >= 1 && s.per_class_train >= 1 && s.per_class_test >= 1 && s.dim >= 1,
          "data.synthetic: counts and dim must be >= 1");
  require(s.noise >= 0.0, "data.synthetic.noise must be >= 0");

  const auto& m = cfg.model;
  require(m.dims.size() >= 2, "model.dims: need at least two entries");
  require(std::all_of(m.dims.begin(), m.dims.end(), [](int d) { return d >= 1; }), "model.dims: entries must be >= 1");
  require(m.class_count >= 1 && m.class_count <= m.dims.back(), "model.class_count must be in [1, last dim]");
  require(std::isfinite(m.bias), "model.bias must be finite");
  if (cfg.data.source == DataConfig::Source::synthetic) {
    require(m.dims.front() == s.dim, "model.dims[0] must equal data.synthetic.dim");
    require(m.class_count == s.classes, "model.class_count must equal data.synthetic.classes");
  } else {
    require(m.dims.front() == kFeatureLength, "model.dims[0] must be 64 for MNIST features");
    require(m.class_count == 10, "model.class_count must be 10 for MNIST");
  }

  validate_train_section(cfg.train, "train");
  validate_train_section(cfg.oneshot.finetune, "oneshot.finetune");
  validate_train_section(cfg.iterative.finetune, "iterative.finetune");
  require(!cfg.oneshot.alphas.empty(), "oneshot.alphas must not be empty");
  require(std::all_of(cfg.oneshot.alphas.begin(), cfg.oneshot.alphas.end(), [](double a) { return a >= 0.0; }),
          "oneshot.alphas must be >= 0");
  require(cfg.iterative.delta_alpha > 0.0, "iterative.delta_alpha must be > 0");
  require(!cfg.iterative.alpha0 || *cfg.iterative.alpha0 >= 0.0, "iterative.alpha0 must be >= 0");
  require(cfg.iterative.max_iters >= 0, "iterative.max_iters must be >= 0");

  require(!cfg.uncertainty.sigmas.empty(), "uncertainty.sigmas must not be empty");
  require(std::all_of(cfg.uncertainty.sigmas.begin(), cfg.uncertainty.sigmas.end(), [](double v) { return v >= 0.0; }),
          "uncertainty.sigmas must be >= 0");
  require(cfg.uncertainty.iterations >= 1, "uncertainty.iterations must be >= 1");
  require(!cfg.uncertainty.modes.empty(), "uncertainty.modes must not be empty");

  try {
    validate_bma_config(cfg.bma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(cfg.report.histogram_bins >= 1, "report.histogram_bins must be >= 1");
}

namespace {

Dataset truncate(Dataset d, std::size_t limit) {
  if (limit > 0 && limit < d.size()) {
    d.features.resize(limit);
    d.labels.resize(limit);
  }
  return d;
}

}  // namespace

DataSplits load_data(const ExperimentConfig& cfg) {
  if (cfg.data.source == DataConfig::Source::synthetic) {
    const auto& s = cfg.data.synthetic;
    const auto base = s.seed.value_or(derive_seed(cfg.seed, 0));
    // Train and test share centroids (same generator seed); the test split
    // takes the items after the training ones.
    Dataset all = synth_dataset(s.classes, s.per_class_train + s.per_class_test, s.dim, base, s.noise);
    const auto n_train = static_cast<std::size_t>(s.classes) * s.per_class_train;
    DataSplits out;
    out.train.features.assign(all.features.begin(), all.features.begin() + n_train);
    out.train.labels.assign(all.labels.begin(), all.labels.begin() + n_train);
    out.test.features.assign(all.features.begin() + n_train, all.features.end());
    out.test.labels.assign(all.labels.begin() + n_train, all.labels.end());
    return out;
  }
  const auto& m = cfg.data.mnist;
  if (m.dir.empty()) throw DataError(std::string("data.mnist.dir is not set (or set ") + kDataDirEnv + ")");
  DataSplits out;
  out.train = truncate(mnist_features(load_mnist_idx(m.dir / m.train_images, m.dir / m.train_labels)), m.train_limit);
  out.test = truncate(mnist_features(load_mnist_idx(m.dir / m.test_images, m.dir / m.test_labels)), m.test_limit);
  return out;
}

}  // namespace champ
