#pragma once

#include <span>
#include <string>
#include <vector>

#include "champ/bma.hpp"
#include "champ/network.hpp"
#include "champ/pruning.hpp"
#include "champ/training.hpp"
#include "champ/uncertainty.hpp"

namespace champ {

/// Formats a double with enough digits to round-trip, '.' decimal separator.
std::string format_double(double v);

/// stage,alpha,ps_sparsity_pct,mean_phase_rad,accuracy,epochs_finetuned,wall_time_s,accepted
std::string prune_reports_csv(std::span<const PruneReport> reports);
std::string prune_reports_json(std::span<const PruneReport> reports);

std::string history_csv(std::span<const EpochRecord> history);

/// sigma_ps,mode,mean_acc,std_acc,n
std::string mc_results_csv(std::span<const McResult> results);

/// dim,s_w_pct,weight_sparsity_pct,ps_sparsity_pct
std::string bma_records_csv(std::span<const BmaRecord> records);

/// Histogram of |φ| over [0, π] with `bins` equal-width bins; π lands in the last bin.
std::vector<std::size_t> phase_histogram(std::span<const double> phases, int bins);

struct NamedHistogram {
  std::string name;
  std::vector<double> phases;
};

/// bin_low,bin_high,<name>... one column of counts per model.
std::string phase_histogram_csv(std::span<const NamedHistogram> models, int bins);

}  // namespace champ
