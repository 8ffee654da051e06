#include "champ/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "champ/errors.hpp"
#include "champ/phase.hpp"

namespace champ {

namespace {

constexpr Complex kI{0.0, 1.0};

std::vector<MziNode> clements_layout(int n) {
  std::vector<MziNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int c = 0; c < n; ++c) {
    for (int p = c % 2; p <= n - 2; p += 2) nodes.push_back({0.0, 0.0, c, p});
  }
  return nodes;
}

inline void apply_block(const Mat2& t, Complex& a, Complex& b) {
  const Complex na = t(0, 0) * a + t(0, 1) * b;
  const Complex nb = t(1, 0) * a + t(1, 1) * b;
  a = na;
  b = nb;
}

// Entries of a unitary below this magnitude are round-off and are nulled as
// exact zeros, so their angles do not come from ratios of noise.
constexpr double kNegligible = 1e-14;

Complex clean(Complex z) { return std::abs(z) < kNegligible ? Complex{} : z; }

// A 2×2 operation recorded during nulling, acting on ports {port, port+1}.
struct Rotation {
  int port;
  double theta;
  double phi;
};

}  // namespace

UnitaryMesh::UnitaryMesh(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("UnitaryMesh: size must be >= 1");
  mzis_ = clements_layout(size);
  output_phases_.assign(static_cast<std::size_t>(size), 0.0);
}

std::vector<double> UnitaryMesh::phases() const {
  std::vector<double> out;
  out.reserve(phase_count());
  write_phases(out);
  return out;
}

void UnitaryMesh::write_phases(std::vector<double>& out) const {
  for (const auto& m : mzis_) {
    out.push_back(m.theta);
    out.push_back(m.phi);
  }
  out.insert(out.end(), output_phases_.begin(), output_phases_.end());
}

void UnitaryMesh::set_phases(std::span<const double> values) {
  if (values.size() != phase_count()) {
    throw std::invalid_argument("UnitaryMesh::set_phases: expected " +
                                std::to_string(phase_count()) + " values, got " +
                                std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (auto& m : mzis_) {
    m.theta = values[k++];
    m.phi = values[k++];
  }
  for (auto& p : output_phases_) p = values[k++];
}

ComplexVector UnitaryMesh::forward(const ComplexVector& x) const { return mesh_forward(*this, x); }

Mat2 mzi_transfer(double theta, double phi) {
  const Complex k = kI * std::polar(1.0, theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  Mat2 t;
  t << k * e * s, k * c,
       k * e * c, -k * s;
  return t;
}

Mat2 mzi_transfer_dtheta(double theta, double phi) {
  const Complex k = kI * std::polar(1.0, theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  Mat2 d;
  d << e * c, -s,
      -e * s, -c;
  return 0.5 * kI * mzi_transfer(theta, phi) + 0.5 * k * d;
}

Mat2 mzi_transfer_dphi(double theta, double phi) {
  Mat2 t = mzi_transfer(theta, phi);
  t.col(0) *= kI;
  t.col(1).setZero();
  return t;
}

ComplexMatrix mesh_matrix(const UnitaryMesh& mesh) {
  const int n = mesh.size();
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  for (const auto& node : mesh.mzis()) {
    const Mat2 t = mzi_transfer(node.theta, node.phi);
    const auto p = node.top_port;
    // Left-multiply by the embedded block: only rows p and p+1 change.
    for (int col = 0; col < n; ++col) apply_block(t, m(p, col), m(p + 1, col));
  }
  for (int r = 0; r < n; ++r) m.row(r) *= std::polar(1.0, mesh.output_phases()[r]);
  return m;
}

ComplexVector mesh_forward(const UnitaryMesh& mesh, const ComplexVector& x) {
  if (x.size() != mesh.size()) {
    throw std::invalid_argument("mesh_forward: input length " + std::to_string(x.size()) +
                                " does not match mesh size " + std::to_string(mesh.size()));
  }
  ComplexVector y = x;
  for (const auto& node : mesh.mzis()) {
    apply_block(mzi_transfer(node.theta, node.phi), y(node.top_port), y(node.top_port + 1));
  }
  for (int k = 0; k < mesh.size(); ++k) y(k) *= std::polar(1.0, mesh.output_phases()[k]);
  return y;
}

UnitaryMesh clements_decompose(const ComplexMatrix& u_in, double tol) {
  if (u_in.rows() == 0 || u_in.cols() == 0) {
    throw std::invalid_argument("clements_decompose: empty matrix");
  }
  if (u_in.rows() != u_in.cols()) {
    throw std::invalid_argument("clements_decompose: matrix is not square");
  }
  if (!u_in.allFinite()) throw std::invalid_argument("clements_decompose: non-finite entries");
  const double err = unitarity_error(u_in);
  if (!(err < tol)) {
    throw ContractViolation("clements_decompose: matrix is not unitary (‖U†U − I‖_F = " +
                            std::to_string(err) + ")");
  }

  const int n = static_cast<int>(u_in.rows());
  ComplexMatrix u = u_in;
  std::vector<Rotation> from_right;  // U ← U·T†, in nulling order
  std::vector<Rotation> from_left;   // U ← T·U, in nulling order

  for (int i = 0; i < n - 1; ++i) {
    if (i % 2 == 0) {
      for (int j = 0; j <= i; ++j) {
        const int row = n - 1 - j;
        const int col = i - j;
        const Complex a = clean(u(row, col));
        const Complex b = clean(u(row, col + 1));
        const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
        const double phi = (a != 0.0 && b != 0.0) ? std::arg(a) - std::arg(b) + kPi : 0.0;
        const Mat2 td = mzi_transfer(theta, phi).adjoint();
        for (int r = 0; r < n; ++r) {
          const Complex x0 = u(r, col);
          const Complex x1 = u(r, col + 1);
          u(r, col) = x0 * td(0, 0) + x1 * td(1, 0);
          u(r, col + 1) = x0 * td(0, 1) + x1 * td(1, 1);
        }
        u(row, col) = 0.0;
        from_right.push_back({col, theta, phi});
      }
    } else {
      for (int j = 1; j <= i + 1; ++j) {
        const int row = n + j - i - 2;
        const int col = j - 1;
        const Complex a = clean(u(row - 1, col));
        const Complex b = clean(u(row, col));
        const double theta = 2.0 * std::atan2(std::abs(a), std::abs(b));
        const double phi = (a != 0.0 && b != 0.0) ? std::arg(b) - std::arg(a) : 0.0;
        const Mat2 t = mzi_transfer(theta, phi);
        for (int c = 0; c < n; ++c) apply_block(t, u(row - 1, c), u(row, c));
        u(row, col) = 0.0;
        from_left.push_back({row - 1, theta, phi});
      }
    }
  }

  // u is now diagonal D with Lk⋯L1·U·R1†⋯Rm† = D, so U = L1†⋯Lk†·D·Rm⋯R1.
  // Push every L† through D: T(θ,φ)†·diag(d1,d2) = diag(d1',d2')·T(θ,φ').
  std::vector<Complex> d(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) d[k] = u(k, k);

  std::vector<Rotation> sequence = from_right;  // input-to-output order
  for (auto it = from_left.rbegin(); it != from_left.rend(); ++it) {
    const int p = it->port;
    const Complex d1 = d[p];
    const Complex d2 = d[p + 1];
    const Complex g = -std::polar(1.0, -it->theta);
    sequence.push_back({p, it->theta, std::arg(d1) - std::arg(d2)});
    d[p] = g * std::polar(1.0, -it->phi) * d2;
    d[p + 1] = g * d2;
  }

  // Place the sequence into the rectangular grid by earliest available column.
  std::vector<int> next_free(static_cast<std::size_t>(n), 0);
  std::map<std::pair<int, int>, MziNode> placed;
  for (const auto& r : sequence) {
    int col = std::max(next_free[r.port], next_free[r.port + 1]);
    if ((col - r.port) % 2 != 0) ++col;
    next_free[r.port] = next_free[r.port + 1] = col + 1;
    const auto [_, inserted] =
        placed.emplace(std::pair{col, r.port},
                       MziNode{wrap_phase(r.theta), wrap_phase(r.phi), col, r.port});
    if (!inserted) throw std::logic_error("clements_decompose: grid slot used twice");
  }

  UnitaryMesh mesh(n);
  for (auto& node : mesh.mzis()) {
    const auto it = placed.find({node.column, node.top_port});
    if (it == placed.end()) throw std::logic_error("clements_decompose: grid slot left empty");
    node = it->second;
  }
  if (placed.size() != mesh.mzi_count()) {
    throw std::logic_error("clements_decompose: MZI count does not match the layout");
  }
  for (int k = 0; k < n; ++k) mesh.output_phases()[k] = wrap_phase(std::arg(d[k]));
  return mesh;
}

}  // namespace champ
