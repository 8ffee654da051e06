#pragma once

#include <complex>

#include <Eigen/Dense>

namespace champ {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;

/// ‖A†A − I‖_F
inline double unitarity_error(const ComplexMatrix& a) {
  const auto n = a.cols();
  return (a.adjoint() * a - ComplexMatrix::Identity(n, n)).norm();
}

inline bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

}  // namespace champ
