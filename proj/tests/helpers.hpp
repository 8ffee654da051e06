#pragma once

#include <complex>
#include <random>
#include <vector>

#include "champ/linalg.hpp"

namespace champ::test {

inline ComplexMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex{re, im};
    }
  }
  return m;
}

inline ComplexVector random_vector(int n, std::mt19937_64& rng) { return random_complex(n, 1, rng).col(0); }

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases removed.
inline ComplexMatrix haar_unitary(int n, std::mt19937_64& rng) {
  const ComplexMatrix z = random_complex(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

inline double rel_err(const ComplexVector& a, const ComplexVector& b) {
  const double n = b.norm();
  return (a - b).norm() / (n > 0.0 ? n : 1.0);
}

}  // namespace champ::test
