#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "champ/linalg.hpp"

namespace champ {

/// One Mach–Zehnder interferometer in a rectangular (Clements) mesh.
/// `theta` is the internal arm phase, `phi` the external phase on the top input.
struct MziNode {
  double theta = 0.0;
  double phi = 0.0;
  int column = 0;
  int top_port = 0;  // acts on ports {top_port, top_port + 1}

  bool operator==(const MziNode&) const = default;
};

/// N×N unitary as a Clements arrangement of N(N−1)/2 MZIs followed by a
/// column of N output phase shifters. MZIs are kept sorted by (column, top_port),
/// which is also a valid input-to-output application order.
class UnitaryMesh {
 public:
  UnitaryMesh() = default;

  /// Mesh with the full Clements layout for `size` ports and all phases zero.
  explicit UnitaryMesh(int size);

  int size() const noexcept { return size_; }
  std::size_t mzi_count() const noexcept { return mzis_.size(); }
  /// Number of phase shifters: 2 per MZI plus the output column, always N².
  std::size_t phase_count() const noexcept { return 2 * mzis_.size() + output_phases_.size(); }

  const std::vector<MziNode>& mzis() const noexcept { return mzis_; }
  std::vector<MziNode>& mzis() noexcept { return mzis_; }
  const std::vector<double>& output_phases() const noexcept { return output_phases_; }
  std::vector<double>& output_phases() noexcept { return output_phases_; }

  /// Phases flattened in canonical order: θ₀ φ₀ θ₁ φ₁ … ψ₀ … ψ_{N−1}.
  std::vector<double> phases() const;
  void write_phases(std::vector<double>& out) const;
  void set_phases(std::span<const double> values);

  /// Applies the mesh by sequential 2×2 block updates.
  ComplexVector forward(const ComplexVector& x) const;

  bool operator==(const UnitaryMesh&) const = default;

 private:
  int size_ = 0;
  std::vector<MziNode> mzis_;
  std::vector<double> output_phases_;
};

/// T(θ,φ) = i·e^{iθ/2} · [[e^{iφ} sin(θ/2), cos(θ/2)], [e^{iφ} cos(θ/2), −sin(θ/2)]]
Mat2 mzi_transfer(double theta, double phi);
Mat2 mzi_transfer_dtheta(double theta, double phi);
Mat2 mzi_transfer_dphi(double theta, double phi);

/// Dense N×N matrix the mesh implements.
ComplexMatrix mesh_matrix(const UnitaryMesh& mesh);

/// Equivalent to mesh_matrix(mesh) * x without materializing the matrix.
/// Throws std::invalid_argument on dimension mismatch.
ComplexVector mesh_forward(const UnitaryMesh& mesh, const ComplexVector& x);

inline constexpr double kDefaultUnitaryTol = 1e-8;

/// Clements decomposition of a unitary into the rectangular mesh. Phases are
/// wrapped to (−π, π]; the residual diagonal ends up in the output phases.
/// Throws std::invalid_argument for an empty or non-square matrix and
/// ContractViolation when ‖U†U − I‖_F ≥ tol.
UnitaryMesh clements_decompose(const ComplexMatrix& u, double tol = kDefaultUnitaryTol);

}  // namespace champ
