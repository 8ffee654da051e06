#include "champ/svd_layer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "champ/errors.hpp"

namespace champ {

std::vector<double> SvdLayer::sigmas() const {
  std::vector<double> s(rank());
  for (std::size_t k = 0; k < rank(); ++k) s[k] = sigma(k);
  return s;
}

void SvdLayer::set_sigmas(std::span<const double> sigma) {
  if (sigma.size() != rank()) throw std::invalid_argument("SvdLayer::set_sigmas: length mismatch");
  for (std::size_t k = 0; k < rank(); ++k) {
    if (!(sigma[k] >= 0.0)) throw std::invalid_argument("SvdLayer::set_sigmas: negative gain");
    gain_params[k] = std::sqrt(sigma[k]);
  }
}

SvdLayer make_layer(int in_dim, int out_dim) {
  SvdLayer layer{UnitaryMesh(in_dim), {}, UnitaryMesh(out_dim)};
  layer.gain_params.assign(static_cast<std::size_t>(std::min(in_dim, out_dim)), 1.0);
  return layer;
}

SvdLayer layer_from_weights(const ComplexMatrix& w) {
  if (w.rows() == 0 || w.cols() == 0) throw std::invalid_argument("layer_from_weights: empty matrix");
  if (!w.allFinite()) throw std::invalid_argument("layer_from_weights: non-finite weights");

  Eigen::JacobiSVD<ComplexMatrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericError("layer_from_weights: SVD did not converge");

  SvdLayer layer;
  layer.mesh_u = clements_decompose(svd.matrixU());
  layer.mesh_v = clements_decompose(svd.matrixV().adjoint());
  const auto& s = svd.singularValues();
  layer.gain_params.resize(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) layer.gain_params[k] = std::sqrt(s(k));
  return layer;
}

ComplexMatrix layer_to_weights(const SvdLayer& layer) {
  ComplexMatrix sigma = ComplexMatrix::Zero(layer.out_dim(), layer.in_dim());
  for (std::size_t k = 0; k < layer.rank(); ++k) sigma(k, k) = layer.sigma(k);
  return mesh_matrix(layer.mesh_u) * sigma * mesh_matrix(layer.mesh_v);
}

ComplexVector layer_forward(const SvdLayer& layer, const ComplexVector& x) {
  if (x.size() != layer.in_dim()) {
    throw std::invalid_argument("layer_forward: input length " + std::to_string(x.size()) +
                                " does not match in_dim " + std::to_string(layer.in_dim()));
  }
  const ComplexVector t = mesh_forward(layer.mesh_v, x);
  ComplexVector mid = ComplexVector::Zero(layer.out_dim());
  for (std::size_t k = 0; k < layer.rank(); ++k) mid(k) = layer.sigma(k) * t(k);
  return mesh_forward(layer.mesh_u, mid);
}

namespace {

MeshCensus census_entry(std::size_t layer, char which, int size) {
  const auto n = static_cast<std::size_t>(size);
  return {layer, which, size, n * (n - 1) / 2, n * n};
}

}  // namespace

PsCensus ps_census(std::span<const SvdLayer> layers) {
  PsCensus c;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (auto [which, mesh] : {std::pair{'v', &layers[i].mesh_v}, std::pair{'u', &layers[i].mesh_u}}) {
      MeshCensus e{i, which, mesh->size(), mesh->mzi_count(), mesh->phase_count()};
      c.total += e.phase_shifters;
      c.meshes.push_back(e);
    }
  }
  return c;
}

PsCensus ps_census(std::span<const int> dims) {
  PsCensus c;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i + 1] < 1) throw std::invalid_argument("ps_census: dimensions must be >= 1");
    for (auto e : {census_entry(i, 'v', dims[i]), census_entry(i, 'u', dims[i + 1])}) {
      c.total += e.phase_shifters;
      c.meshes.push_back(e);
    }
  }
  return c;
}

}  // namespace champ
