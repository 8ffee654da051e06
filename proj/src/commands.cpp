#include "champ/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "champ/checkpoint.hpp"
#include "champ/config.hpp"
#include "champ/errors.hpp"
#include "champ/pruning.hpp"
#include "champ/report.hpp"
#include "champ/rng.hpp"
#include "champ/svd_layer.hpp"
#include "champ/uncertainty.hpp"

namespace champ {

namespace fs = std::filesystem;

namespace {

int guarded(const char* name, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << name << ": data error: " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    std::cerr << name << ": data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << name << ": numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << name << ": invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << name << ": I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << name << ": error: " << e.what() << '\n';
    return kExitUsage;
  }
}

ExperimentConfig prepare_config(const CommandOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required");
  auto cfg = load_config(opts.config);
  apply_overrides(cfg, opts.seed, opts.workers);
  return cfg;
}

void prepare_out_dir(const CommandOptions& opts) {
  if (opts.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(opts.out);
}

void check_finite(const ScIpnn& net) {
  for (double v : get_params(net).values) {
    if (!std::isfinite(v)) throw NumericError("training produced non-finite parameters");
  }
}

void check_model_matches_data(const ScIpnn& net, const Dataset& data) {
  if (!data.empty() && net.input_dim() != data.feature_dim()) {
    throw ConfigError("checkpoint input dimension does not match the dataset feature length");
  }
}

OsConfig os_config(const ExperimentConfig& cfg, double baseline) {
  return {cfg.oneshot.alphas, cfg.oneshot.acc_min.resolve(baseline), cfg.oneshot.finetune, cfg.workers};
}

ItConfig it_config(const ExperimentConfig& cfg, double baseline) {
  return {cfg.iterative.alpha0, cfg.iterative.delta_alpha, cfg.iterative.acc_min.resolve(baseline),
          cfg.iterative.finetune, cfg.iterative.max_iters};
}

}  // namespace

std::string exit_code_help() {
  return "Exit codes:\n"
         "  0  success\n"
         "  1  usage or unexpected error\n"
         "  2  configuration error (bad config, unknown key, invalid value)\n"
         "  3  data error (missing or malformed dataset or checkpoint)\n"
         "  4  numeric failure (SVD non-convergence, non-finite parameters)\n"
         "  5  champ: no one-shot candidate met the accuracy floor (reports still written)\n"
         "  6  I/O error writing outputs\n";
}

int run_train(const CommandOptions& opts) {
  return guarded("train", [&] {
    const auto cfg = prepare_config(opts);
    const auto data = load_data(cfg);

    ModelCheckpoint ckpt;
    TrainConfig tc = cfg.train;
    if (opts.resume) {
      ckpt = load_checkpoint(*opts.resume);
      tc.seed = derive_seed(tc.seed, static_cast<std::uint64_t>(ckpt.training.epochs));
    } else {
      ckpt.net = make_network(cfg.model.dims, cfg.model.class_count, cfg.model.bias, derive_seed(cfg.seed, 5));
      ckpt.training = {cfg.seed, 0};
    }
    check_model_matches_data(ckpt.net, data.train);

    std::vector<EpochRecord> history;
    if (tc.epochs > 0) {
      auto result = train(ckpt.net, data.train, tc, ckpt.mask);
      check_finite(result.net);
      ckpt.net = std::move(result.net);
      history = std::move(result.history);
      ckpt.training.epochs += tc.epochs;
    }

    prepare_out_dir(opts);
    save_checkpoint(opts.out / "model.json", ckpt);
    write_file_atomic(opts.out / "history.csv", history_csv(history));
    std::cout << "train: epochs=" << ckpt.training.epochs << " train_acc=" << evaluate(ckpt.net, data.train)
              << " test_acc=" << evaluate(ckpt.net, data.test) << '\n';
    return kExitOk;
  });
}

int run_champ(const CommandOptions& opts) {
  return guarded("champ", [&] {
    const auto cfg = prepare_config(opts);
    if (!opts.checkpoint) throw ConfigError("--checkpoint is required");
    const auto ckpt = load_checkpoint(*opts.checkpoint);
    const auto data = load_data(cfg);
    check_model_matches_data(ckpt.net, data.test);

    const double baseline = evaluate(ckpt.net, data.test);
    const PruneData pd{data.train, data.test};
    auto result = champ(ckpt.net, os_config(cfg, baseline), it_config(cfg, baseline), pd, ckpt.mask);

    auto trail = result.trail();
    if (!opts.timing) {
      for (auto& r : trail) r.wall_time_s = 0.0;
    }
    std::vector<NamedHistogram> hist{{"unpruned", phase_vector(ckpt.net)}};
    if (result.oneshot_winner) hist.push_back({"oneshot", phase_vector(result.oneshot_winner->net)});
    if (result.final_model) hist.push_back({"iterative", phase_vector(result.final_model->net)});

    prepare_out_dir(opts);
    write_file_atomic(opts.out / "report.csv", prune_reports_csv(trail));
    write_file_atomic(opts.out / "report.json", prune_reports_json(trail));
    write_file_atomic(opts.out / "histogram.csv", phase_histogram_csv(hist, cfg.report.histogram_bins));
    if (!result.qualified()) {
      std::cerr << "champ: no one-shot candidate reached the accuracy floor\n";
      return kExitNoCandidate;
    }
    const TrainingMeta meta = ckpt.training;
    save_checkpoint(opts.out / "oneshot.json", {result.oneshot_winner->net, result.oneshot_winner->mask, meta});
    save_checkpoint(opts.out / "pruned.json", {result.final_model->net, result.final_model->mask, meta});
    const auto& f = result.final_model->report;
    std::cout << "champ: baseline_acc=" << baseline << " final_alpha=" << f.alpha << " sparsity_pct=" << f.ps_sparsity
              << " accuracy=" << f.accuracy << " mean_phase=" << f.mean_phase << '\n';
    return kExitOk;
  });
}

int run_mc(const CommandOptions& opts) {
  return guarded("mc", [&] {
    const auto cfg = prepare_config(opts);
    if (!opts.checkpoint) throw ConfigError("--checkpoint is required");
    const auto ckpt = load_checkpoint(*opts.checkpoint);
    const auto data = load_data(cfg);
    check_model_matches_data(ckpt.net, data.test);
    const PruneMask mask = ckpt.mask.value_or(PruneMask::all_ones(ckpt.net.phase_count()));

    std::vector<McResult> rows;
    for (double sigma : cfg.uncertainty.sigmas) {
      for (auto mode : cfg.uncertainty.modes) {
        // Same noise seed for every row: modes and σ levels are compared on common draws.
        UncertaintyConfig uc{sigma, cfg.uncertainty.iterations, mode, derive_seed(cfg.seed, 6), cfg.workers};
        rows.push_back(monte_carlo_accuracy(ckpt.net, mask, data.test, uc));
      }
    }
    prepare_out_dir(opts);
    write_file_atomic(opts.out / "mc.csv", mc_results_csv(rows));
    std::cout << "mc: wrote " << rows.size() << " rows\n";
    return kExitOk;
  });
}

int run_bma(const CommandOptions& opts) {
  return guarded("bma", [&] {
    const auto cfg = prepare_config(opts);
    const auto records = bma_experiment(cfg.bma);
    prepare_out_dir(opts);
    write_file_atomic(opts.out / "bma.csv", bma_records_csv(records));
    std::cout << "bma: wrote " << records.size() << " rows\n";
    return kExitOk;
  });
}

int run_census(const CommandOptions& opts) {
  return guarded("census", [&] {
    PsCensus census;
    if (opts.checkpoint) {
      const auto ckpt = load_checkpoint(*opts.checkpoint);
      census = ps_census(std::span<const SvdLayer>(ckpt.net.layers));
    } else if (!opts.dims.empty()) {
      census = ps_census(std::span<const int>(opts.dims));
    } else if (!opts.config.empty()) {
      census = ps_census(std::span<const int>(prepare_config(opts).model.dims));
    } else {
      throw ConfigError("census needs --dims, --checkpoint or --config");
    }
    std::ostringstream csv;
    csv << "layer,mesh,size,mzis,phase_shifters\n";
    for (const auto& m : census.meshes) {
      csv << m.layer << ',' << m.which << ',' << m.size << ',' << m.mzis << ',' << m.phase_shifters << '\n';
    }
    std::cout << csv.str() << "total," << census.total << '\n';
    if (!opts.out.empty()) {
      prepare_out_dir(opts);
      write_file_atomic(opts.out / "census.csv", csv.str());
    }
    return kExitOk;
  });
}

}  // namespace champ
