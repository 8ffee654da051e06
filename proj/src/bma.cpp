#include "champ/bma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "champ/parallel.hpp"
#include "champ/rng.hpp"
#include "champ/svd_layer.hpp"

namespace champ {

void validate_bma_config(const BmaConfig& cfg) {
  if (cfg.dims.empty()) throw std::invalid_argument("bma: dims must not be empty");
  for (int d : cfg.dims) {
    if (d < 1) throw std::invalid_argument("bma: dims must be >= 1");
  }
  if (cfg.samples_per_dim < 0) throw std::invalid_argument("bma: samples_per_dim must be >= 0");
  if (!(0.0 <= cfg.sw_low && cfg.sw_low <= cfg.sw_high && cfg.sw_high <= 100.0)) {
    throw std::invalid_argument("bma: need 0 <= sw_low <= sw_high <= 100");
  }
  if (!(cfg.zero_tol > 0.0)) throw std::invalid_argument("bma: zero_tol must be > 0");
}

ComplexMatrix random_sparse_matrix(int dim, double sw_pct, std::mt19937_64& rng) {
  if (dim < 1) throw std::invalid_argument("random_sparse_matrix: dim must be >= 1");
  if (!(sw_pct >= 0.0 && sw_pct <= 100.0)) {
    throw std::invalid_argument("random_sparse_matrix: s_w must be in [0, 100]");
  }
  const auto total = static_cast<std::size_t>(dim) * dim;
  const auto zeros = static_cast<std::size_t>(std::llround(sw_pct / 100.0 * static_cast<double>(total)));

  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexMatrix w(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      w(i, j) = Complex{re, im};
    }
  }
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t k = 0; k < zeros; ++k) w(idx[k] / dim, idx[k] % dim) = 0.0;
  return w;
}

std::vector<BmaRecord> bma_experiment(const BmaConfig& cfg) {
  validate_bma_config(cfg);
  const auto per = static_cast<std::size_t>(cfg.samples_per_dim);
  std::vector<BmaRecord> records(cfg.dims.size() * per);

  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    const int dim = cfg.dims[i / per];
    std::mt19937_64 rng(derive_seed(cfg.seed, i));
    std::uniform_real_distribution<double> sw_dist(cfg.sw_low, cfg.sw_high);
    const double sw = cfg.sw_low == cfg.sw_high ? cfg.sw_low : sw_dist(rng);
    const ComplexMatrix w = random_sparse_matrix(dim, sw, rng);
    const auto layer = layer_from_weights(w);

    std::size_t zero_w = 0;
    for (Eigen::Index k = 0; k < w.size(); ++k) zero_w += (w.data()[k] == 0.0);
    std::size_t zero_ps = 0;
    std::size_t total_ps = 0;
    for (const auto* mesh : {&layer.mesh_v, &layer.mesh_u}) {
      for (double p : mesh->phases()) {
        zero_ps += std::abs(p) < cfg.zero_tol;
        ++total_ps;
      }
    }
    records[i] = {dim, sw, 100.0 * static_cast<double>(zero_w) / static_cast<double>(w.size()),
                  100.0 * static_cast<double>(zero_ps) / static_cast<double>(total_ps)};
  });
  return records;
}

}  // namespace champ
