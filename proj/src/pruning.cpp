#include "champ/pruning.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "champ/parallel.hpp"

namespace champ {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

PruneReport make_report(PruneStage stage, double alpha, const ScIpnn& net, const PruneMask& mask,
                        double accuracy, int epochs) {
  PruneReport r;
  r.stage = stage;
  r.alpha = alpha;
  r.ps_sparsity = sparsity(mask);
  r.mean_phase = mean_phase(net);
  r.accuracy = accuracy;
  r.epochs_finetuned = epochs;
  return r;
}

// Prune at α, fine-tune under the new mask, measure.
PrunedModel prune_and_finetune(const ScIpnn& net, const PruneMask& prior, double alpha,
                               PruneStage stage, const TrainConfig& finetune, const PruneData& data) {
  const auto t0 = Clock::now();
  auto [pruned, mask] = apply_magnitude_prune(net, alpha, prior);
  // Nothing newly pruned: the input is already fine-tuned, keep it as is.
  const bool changed = mask != prior;
  int epochs = 0;
  if (changed) {
    pruned = train(std::move(pruned), data.train, finetune, mask).net;
    epochs = finetune.epochs;
  }
  const double acc = evaluate(pruned, data.eval);
  PrunedModel m{std::move(pruned), std::move(mask), {}};
  m.report = make_report(stage, alpha, m.net, m.mask, acc, epochs);
  m.report.wall_time_s = seconds_since(t0);
  return m;
}

}  // namespace

std::string to_string(PruneStage stage) {
  switch (stage) {
    case PruneStage::baseline: return "baseline";
    case PruneStage::oneshot: return "oneshot";
    case PruneStage::iterative: return "iterative";
  }
  return "unknown";
}

double threshold_for_mesh(std::span<const double> phases, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("threshold_for_mesh: alpha must be >= 0");
  double sum = 0.0;
  std::size_t n = 0;
  for (double p : phases) {
    if (p != 0.0) {
      sum += std::abs(p);
      ++n;
    }
  }
  if (n == 0 || alpha == 0.0) return 0.0;
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double p : phases) {
    if (p != 0.0) var += (std::abs(p) - mean) * (std::abs(p) - mean);
  }
  return alpha * std::sqrt(var / static_cast<double>(n));
}

std::pair<ScIpnn, PruneMask> apply_magnitude_prune(ScIpnn net, double alpha,
                                                   const std::optional<PruneMask>& prior) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("apply_magnitude_prune: alpha must be >= 0");
  std::vector<double> phases = phase_vector(net);
  PruneMask mask = prior ? *prior : PruneMask::all_ones(phases.size());
  if (mask.size() != phases.size()) {
    throw std::invalid_argument("apply_magnitude_prune: mask length does not match the phase count");
  }
  for (const auto& slice : mesh_slices(net)) {
    const std::span<double> mesh(phases.data() + slice.offset, slice.length);
    const double thr = threshold_for_mesh(mesh, alpha);
    for (std::size_t k = 0; k < slice.length; ++k) {
      if (std::abs(mesh[k]) < thr) mask.bits[slice.offset + k] = 0;
    }
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (mask.bits[i] == 0) phases[i] = 0.0;
  }
  set_phase_vector(net, phases);
  return {std::move(net), std::move(mask)};
}

double sparsity(const PruneMask& mask) {
  if (mask.size() == 0) throw std::invalid_argument("sparsity: empty mask");
  return 100.0 * static_cast<double>(mask.zero_count()) / static_cast<double>(mask.size());
}

double mean_phase(const ScIpnn& net) {
  const auto phases = phase_vector(net);
  if (phases.empty()) return 0.0;
  double sum = 0.0;
  for (double p : phases) sum += std::abs(p);
  return sum / static_cast<double>(phases.size());
}

OneShotResult one_shot_prune(const ScIpnn& net, const OsConfig& cfg, const PruneData& data,
                             const std::optional<PruneMask>& prior) {
  if (cfg.alphas.empty()) throw std::invalid_argument("one_shot_prune: need at least one alpha");
  for (double a : cfg.alphas) {
    if (!(a >= 0.0)) throw std::invalid_argument("one_shot_prune: alphas must be >= 0");
  }
  const PruneMask start = prior ? *prior : PruneMask::all_ones(net.phase_count());

  std::vector<std::optional<PrunedModel>> candidates(cfg.alphas.size());
  parallel_for(cfg.alphas.size(), cfg.workers, [&](std::size_t k) {
    candidates[k] = prune_and_finetune(net, start, cfg.alphas[k], PruneStage::oneshot, cfg.finetune, data);
  });

  OneShotResult result;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& r = candidates[k]->report;
    if (r.accuracy < cfg.acc_min) continue;
    if (!best) {
      best = k;
      continue;
    }
    const auto& b = candidates[*best]->report;
    const bool better = r.ps_sparsity > b.ps_sparsity ||
                        (r.ps_sparsity == b.ps_sparsity &&
                         (r.accuracy > b.accuracy || (r.accuracy == b.accuracy && r.alpha < b.alpha)));
    if (better) best = k;
  }
  if (best) candidates[*best]->report.accepted = true;
  for (const auto& c : candidates) result.reports.push_back(c->report);
  if (best) result.best = std::move(*candidates[*best]);
  return result;
}

IterativeResult iterative_prune(const PrunedModel& start, const ItConfig& cfg, const PruneData& data) {
  if (!(cfg.delta_alpha > 0.0)) throw std::invalid_argument("iterative_prune: delta_alpha must be > 0");
  if (cfg.max_iters < 0) throw std::invalid_argument("iterative_prune: max_iters must be >= 0");

  IterativeResult result{start, {}};
  double alpha = cfg.alpha0.value_or(start.report.alpha);
  for (int i = 1; i <= cfg.max_iters; ++i) {
    alpha += cfg.delta_alpha;
    PrunedModel step = prune_and_finetune(result.final_model.net, result.final_model.mask, alpha,
                                          PruneStage::iterative, cfg.finetune, data);
    if (step.report.accuracy < cfg.acc_min) {
      result.reports.push_back(step.report);
      break;
    }
    step.report.accepted = true;
    result.reports.push_back(step.report);
    result.final_model = std::move(step);
  }
  return result;
}

std::vector<PruneReport> ChampResult::trail() const {
  std::vector<PruneReport> out{baseline};
  out.insert(out.end(), oneshot_reports.begin(), oneshot_reports.end());
  out.insert(out.end(), iterative_reports.begin(), iterative_reports.end());
  return out;
}

ChampResult champ(const ScIpnn& net, const OsConfig& os_cfg, const ItConfig& it_cfg,
                  const PruneData& data, const std::optional<PruneMask>& prior) {
  ChampResult result;
  const PruneMask start = prior ? *prior : PruneMask::all_ones(net.phase_count());
  result.baseline = make_report(PruneStage::baseline, 0.0, net, start, evaluate(net, data.eval), 0);
  result.baseline.accepted = true;

  auto os = one_shot_prune(net, os_cfg, data, start);
  result.oneshot_reports = std::move(os.reports);
  if (!os.best) return result;
  result.oneshot_winner = os.best;

  auto it = iterative_prune(*os.best, it_cfg, data);
  result.iterative_reports = std::move(it.reports);
  result.final_model = std::move(it.final_model);
  return result;
}

}  // namespace champ
