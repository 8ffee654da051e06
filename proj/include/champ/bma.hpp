#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "champ/linalg.hpp"

namespace champ {

/// Sparsity of the phase settings obtained by mapping random sparse weight
/// matrices onto meshes.
struct BmaConfig {
  std::vector<int> dims = {8, 16, 32};
  int samples_per_dim = 1000;
  double sw_low = 80.0;   // percent
  double sw_high = 100.0; // percent
  double zero_tol = 1e-10;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct BmaRecord {
  int dim = 0;
  double sw_pct = 0.0;               // requested weight sparsity
  double weight_sparsity_pct = 0.0;  // achieved
  double ps_sparsity_pct = 0.0;
};

void validate_bma_config(const BmaConfig& cfg);

/// dim×dim complex standard-Gaussian matrix with exactly round(s_w/100·dim²)
/// entries, chosen uniformly, set to zero.
ComplexMatrix random_sparse_matrix(int dim, double sw_pct, std::mt19937_64& rng);

/// Records ordered by (dim, sample). Sample j of dimension d draws from its
/// own stream, so output does not depend on cfg.workers.
std::vector<BmaRecord> bma_experiment(const BmaConfig& cfg);

}  // namespace champ
