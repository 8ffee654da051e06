#include "champ/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace champ {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string prune_reports_csv(std::span<const PruneReport> reports) {
  std::ostringstream out;
  out << "stage,alpha,ps_sparsity_pct,mean_phase_rad,accuracy,epochs_finetuned,wall_time_s,accepted\n";
  for (const auto& r : reports) {
    out << to_string(r.stage) << ',' << format_double(r.alpha) << ',' << format_double(r.ps_sparsity) << ','
        << format_double(r.mean_phase) << ',' << format_double(r.accuracy) << ',' << r.epochs_finetuned << ','
        << format_double(r.wall_time_s) << ',' << (r.accepted ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string prune_reports_json(std::span<const PruneReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"stage", to_string(r.stage)},
                   {"alpha", r.alpha},
                   {"ps_sparsity_pct", r.ps_sparsity},
                   {"mean_phase_rad", r.mean_phase},
                   {"accuracy", r.accuracy},
                   {"epochs_finetuned", r.epochs_finetuned},
                   {"wall_time_s", r.wall_time_s},
                   {"accepted", r.accepted}});
  }
  return nlohmann::json{{"reports", arr}}.dump(2) + "\n";
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::ostringstream out;
  out << "epoch,loss,accuracy\n";
  for (const auto& h : history) {
    out << h.epoch << ',' << format_double(h.loss) << ',' << format_double(h.accuracy) << '\n';
  }
  return out.str();
}

std::string mc_results_csv(std::span<const McResult> results) {
  std::ostringstream out;
  out << "sigma_ps,mode,mean_acc,std_acc,n\n";
  for (const auto& r : results) {
    out << format_double(r.sigma_ps) << ',' << to_string(r.mode) << ',' << format_double(r.mean_accuracy) << ','
        << format_double(r.std_accuracy) << ',' << r.iterations << '\n';
  }
  return out.str();
}

std::string bma_records_csv(std::span<const BmaRecord> records) {
  std::ostringstream out;
  out << "dim,s_w_pct,weight_sparsity_pct,ps_sparsity_pct\n";
  for (const auto& r : records) {
    out << r.dim << ',' << format_double(r.sw_pct) << ',' << format_double(r.weight_sparsity_pct) << ','
        << format_double(r.ps_sparsity_pct) << '\n';
  }
  return out.str();
}

std::vector<std::size_t> phase_histogram(std::span<const double> phases, int bins) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(bins, 1)), 0);
  const double width = kPi / static_cast<double>(counts.size());
  for (double p : phases) {
    const auto b = static_cast<std::size_t>(std::abs(p) / width);
    ++counts[std::min(b, counts.size() - 1)];
  }
  return counts;
}

std::string phase_histogram_csv(std::span<const NamedHistogram> models, int bins) {
  std::vector<std::vector<std::size_t>> counts;
  for (const auto& m : models) counts.push_back(phase_histogram(m.phases, bins));
  std::ostringstream out;
  out << "bin_low,bin_high";
  for (const auto& m : models) out << ',' << m.name;
  out << '\n';
  for (int b = 0; b < bins; ++b) {
    out << format_double(kPi * b / bins) << ',' << format_double(kPi * (b + 1) / bins);
    for (const auto& c : counts) out << ',' << c[b];
    out << '\n';
  }
  return out.str();
}

}  // namespace champ
