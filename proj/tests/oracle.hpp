#pragma once

// Straight-line reference model used only by tests. Builds every mesh as a
// dense product of embedded 2×2 blocks and evaluates the network with dense
// matrices, templated on the scalar so finite differences can run in long double.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "champ/dataset.hpp"
#include "champ/network.hpp"

namespace champ::test {

template <typename R>
using CMat = Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename R>
using CVec = Eigen::Matrix<std::complex<R>, Eigen::Dynamic, 1>;

template <typename R>
CMat<R> oracle_mzi(R theta, R phi) {
  using C = std::complex<R>;
  const C i(0, 1);
  const C k = i * std::exp(i * (theta / 2));
  const C e = std::exp(i * phi);
  CMat<R> t(2, 2);
  t(0, 0) = k * e * std::sin(theta / 2);
  t(0, 1) = k * std::cos(theta / 2);
  t(1, 0) = k * e * std::cos(theta / 2);
  t(1, 1) = -k * std::sin(theta / 2);
  return t;
}

/// Dense matrix of a mesh whose phases are given in canonical order.
template <typename R>
CMat<R> oracle_mesh(const UnitaryMesh& layout, const R* phases) {
  using C = std::complex<R>;
  const int n = layout.size();
  CMat<R> m = CMat<R>::Identity(n, n);
  std::size_t k = 0;
  for (const auto& node : layout.mzis()) {
    CMat<R> full = CMat<R>::Identity(n, n);
    full.block(node.top_port, node.top_port, 2, 2) = oracle_mzi<R>(phases[k], phases[k + 1]);
    k += 2;
    m = full * m;
  }
  CMat<R> d = CMat<R>::Zero(n, n);
  for (int r = 0; r < n; ++r) d(r, r) = std::exp(C(0, 1) * phases[k + r]);
  return d * m;
}

/// Network evaluated from a flat parameter vector laid out like get_params().
template <typename R>
struct OracleNet {
  const ScIpnn& shape;
  std::vector<R> params;

  explicit OracleNet(const ScIpnn& net) : shape(net) {
    for (double v : get_params(net).values) params.push_back(static_cast<R>(v));
  }

  std::vector<R> scores(const ComplexVector& x_in) const {
    using C = std::complex<R>;
    CVec<R> a(x_in.size());
    for (Eigen::Index k = 0; k < x_in.size(); ++k) a(k) = C(x_in(k).real(), x_in(k).imag());

    std::size_t phase_at = 0;
    std::size_t gain_at = shape.phase_count();
    const std::size_t bias_at = gain_at + [&] {
      std::size_t g = 0;
      for (const auto& l : shape.layers) g += l.rank();
      return g;
    }();
    for (std::size_t i = 0; i < shape.layers.size(); ++i) {
      const auto& l = shape.layers[i];
      const CMat<R> v = oracle_mesh<R>(l.mesh_v, params.data() + phase_at);
      phase_at += l.mesh_v.phase_count();
      const CMat<R> u = oracle_mesh<R>(l.mesh_u, params.data() + phase_at);
      phase_at += l.mesh_u.phase_count();
      CMat<R> sigma = CMat<R>::Zero(l.out_dim(), l.in_dim());
      for (std::size_t k = 0; k < l.rank(); ++k) {
        const R g = params[gain_at + k];
        sigma(k, k) = g * g;
      }
      gain_at += l.rank();
      CVec<R> z = u * sigma * v * a;
      if (i + 1 < shape.layers.size()) {
        const R b = params[bias_at + i];
        for (Eigen::Index k = 0; k < z.size(); ++k) {
          const R r = std::abs(z(k));
          z(k) = (r == 0 || r + b <= 0) ? C(0) : (r + b) * (z(k) / r);
        }
      }
      a = z;
    }
    std::vector<R> s(static_cast<std::size_t>(shape.class_count));
    for (int k = 0; k < shape.class_count; ++k) s[k] = std::norm(a(k));
    return s;
  }

  R loss(const Dataset& data) const {
    R total = 0;
    for (std::size_t n = 0; n < data.size(); ++n) {
      const auto s = scores(data.features[n]);
      R m = s[0];
      for (R v : s) m = std::max(m, v);
      R z = 0;
      for (R v : s) z += std::exp(v - m);
      total += m + std::log(z) - s[data.labels[n]];
    }
    return total / static_cast<R>(data.size());
  }
};

}  // namespace champ::test
