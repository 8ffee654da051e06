#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "champ/linalg.hpp"
#include "champ/mesh.hpp"

namespace champ {

/// One linear layer W = U·Σ·V† realized as two meshes around a gain vector.
/// `mesh_v` (size in_dim) implements V†, `mesh_u` (size out_dim) implements U.
/// The gains are stored through an unconstrained parameter g with σ = g².
struct SvdLayer {
  UnitaryMesh mesh_v;
  std::vector<double> gain_params;  // length min(in_dim, out_dim)
  UnitaryMesh mesh_u;

  int in_dim() const noexcept { return mesh_v.size(); }
  int out_dim() const noexcept { return mesh_u.size(); }
  std::size_t rank() const noexcept { return gain_params.size(); }
  std::size_t phase_count() const noexcept { return mesh_v.phase_count() + mesh_u.phase_count(); }

  double sigma(std::size_t k) const noexcept { return gain_params[k] * gain_params[k]; }
  std::vector<double> sigmas() const;
  void set_sigmas(std::span<const double> sigma);

  bool operator==(const SvdLayer&) const = default;
};

/// Layer of the given shape with zero phases and unit gains.
SvdLayer make_layer(int in_dim, int out_dim);

/// SVD + Clements mapping. Gains come out in descending SVD order.
/// Throws std::invalid_argument on an empty or non-finite matrix, NumericError
/// if the SVD fails.
SvdLayer layer_from_weights(const ComplexMatrix& w);

ComplexMatrix layer_to_weights(const SvdLayer& layer);

/// Streams x through mesh_v, keeps the first rank components, scales by σ,
/// zero-pads to out_dim and streams through mesh_u.
ComplexVector layer_forward(const SvdLayer& layer, const ComplexVector& x);

struct MeshCensus {
  std::size_t layer = 0;
  char which = 'v';  // 'v' or 'u'
  int size = 0;
  std::size_t mzis = 0;
  std::size_t phase_shifters = 0;
};

struct PsCensus {
  std::size_t total = 0;
  std::vector<MeshCensus> meshes;
};

PsCensus ps_census(std::span<const SvdLayer> layers);

/// Census from the layer dimensions alone: Σ over consecutive pairs of in² + out².
PsCensus ps_census(std::span<const int> dims);

}  // namespace champ
