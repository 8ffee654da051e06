#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "champ/dataset.hpp"
#include "champ/mask.hpp"
#include "champ/network.hpp"
#include "champ/training.hpp"

namespace champ {

enum class PruneStage { baseline, oneshot, iterative };

std::string to_string(PruneStage stage);

/// One row of the report trail.
struct PruneReport {
  PruneStage stage = PruneStage::baseline;
  double alpha = 0.0;
  double ps_sparsity = 0.0;  // percent
  double mean_phase = 0.0;   // radians
  double accuracy = 0.0;
  int epochs_finetuned = 0;
  double wall_time_s = 0.0;
  bool accepted = false;  // OS: selected winner; IT: kept as checkpoint
};

struct PrunedModel {
  ScIpnn net;
  PruneMask mask;
  PruneReport report;
};

/// Datasets used while pruning: fine-tuning runs on `train`, accuracy is
/// measured on `eval`.
struct PruneData {
  const Dataset& train;
  const Dataset& eval;
};

struct OsConfig {
  std::vector<double> alphas;
  double acc_min = 0.0;
  TrainConfig finetune;
  int workers = 1;
};

struct ItConfig {
  std::optional<double> alpha0;  // defaults to the one-shot winner's α
  double delta_alpha = 0.2;
  double acc_min = 0.0;
  TrainConfig finetune;
  int max_iters = 50;
};

/// α × population standard deviation of the non-zero phase magnitudes; 0 if
/// every phase is zero.
double threshold_for_mesh(std::span<const double> phases, double alpha);

/// Zeroes, mesh by mesh, every phase with |φ| strictly below that mesh's
/// threshold and clears its mask bit. Bits already cleared in `prior` stay cleared.
std::pair<ScIpnn, PruneMask> apply_magnitude_prune(ScIpnn net, double alpha,
                                                   const std::optional<PruneMask>& prior = std::nullopt);

/// Percentage of cleared bits. Throws std::invalid_argument on an empty mask.
double sparsity(const PruneMask& mask);

/// Mean |φ| over every phase shifter, zeros included (static power proxy).
double mean_phase(const ScIpnn& net);

struct OneShotResult {
  std::optional<PrunedModel> best;  // empty: no candidate met acc_min
  std::vector<PruneReport> reports;  // one per α, in input order
};

OneShotResult one_shot_prune(const ScIpnn& net, const OsConfig& cfg, const PruneData& data,
                             const std::optional<PruneMask>& prior = std::nullopt);

struct IterativeResult {
  PrunedModel final_model;
  std::vector<PruneReport> reports;  // every evaluated iteration, including a rejected last one
};

/// `start.report.alpha` is used as α₀ unless cfg.alpha0 is set.
IterativeResult iterative_prune(const PrunedModel& start, const ItConfig& cfg, const PruneData& data);

struct ChampResult {
  std::optional<PrunedModel> oneshot_winner;
  std::optional<PrunedModel> final_model;  // empty when no one-shot candidate qualified
  PruneReport baseline;
  std::vector<PruneReport> oneshot_reports;
  std::vector<PruneReport> iterative_reports;

  bool qualified() const noexcept { return final_model.has_value(); }
  /// Baseline, every one-shot candidate, then every iterative step.
  std::vector<PruneReport> trail() const;
};

/// Hybrid pipeline: one-shot sweep, then iterative pruning from the winner.
ChampResult champ(const ScIpnn& net, const OsConfig& os_cfg, const ItConfig& it_cfg,
                  const PruneData& data, const std::optional<PruneMask>& prior = std::nullopt);

}  // namespace champ
