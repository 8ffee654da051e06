#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "champ/dataset.hpp"
#include "champ/linalg.hpp"
#include "champ/svd_layer.hpp"

namespace champ {

enum class ActivationKind { modrelu };

/// Nonlinearity applied after every hidden layer. modReLU with one fixed bias
/// per hidden layer: a(z) = max(|z| + b, 0)·z/|z|, a(0) = 0.
struct ActivationConfig {
  ActivationKind kind = ActivationKind::modrelu;
  std::vector<double> biases;

  bool operator==(const ActivationConfig&) const = default;
};

inline constexpr double kDefaultBias = -0.1;

/// SVD-based coherent photonic network. Hidden layers are followed by the
/// activation; the last layer feeds photodetectors on its first
/// `class_count` ports, giving scores |z_k|².
struct ScIpnn {
  std::vector<SvdLayer> layers;
  ActivationConfig activation;
  int class_count = 0;

  int input_dim() const noexcept { return layers.empty() ? 0 : layers.front().in_dim(); }
  std::vector<int> dims() const;
  std::size_t phase_count() const noexcept;

  bool operator==(const ScIpnn&) const = default;
};

/// Throws std::invalid_argument if the layer chain, bias count or class count is inconsistent.
void validate_network(const ScIpnn& net);

/// Fresh network: phases i.i.d. uniform on (−π, π], all gains σ = 1.
ScIpnn make_network(std::span<const int> dims, int class_count, double bias, std::uint64_t seed);

/// Location of one mesh inside the phase section of the parameter vector.
struct MeshSlice {
  std::size_t layer;
  char which;  // 'v' or 'u'
  std::size_t offset;
  std::size_t length;
};

/// Flat view over all trainable values. Sections, in order: phases
/// (per layer: mesh_v then mesh_u, each in canonical order), gain parameters
/// g (σ = g²) per layer, activation biases per hidden layer.
struct ParamVector {
  std::vector<double> values;
  std::size_t phase_count = 0;
  std::size_t gain_count = 0;
  std::size_t bias_count = 0;

  std::span<double> phases() { return {values.data(), phase_count}; }
  std::span<const double> phases() const { return {values.data(), phase_count}; }
  std::span<double> gains() { return {values.data() + phase_count, gain_count}; }
  std::span<const double> gains() const { return {values.data() + phase_count, gain_count}; }
  std::span<double> biases() { return {values.data() + phase_count + gain_count, bias_count}; }
  std::span<const double> biases() const {
    return {values.data() + phase_count + gain_count, bias_count};
  }
};

std::vector<MeshSlice> mesh_slices(const ScIpnn& net);
ParamVector get_params(const ScIpnn& net);
void set_params(ScIpnn& net, const ParamVector& params);
std::vector<double> phase_vector(const ScIpnn& net);
void set_phase_vector(ScIpnn& net, std::span<const double> phases);

ComplexVector modrelu(const ComplexVector& z, double bias);

/// Detector scores |z_k|² for the first class_count output ports.
std::vector<double> forward(const ScIpnn& net, const ComplexVector& x);

/// Mean softmax cross-entropy of the scores. Throws std::invalid_argument on
/// an empty batch or a label outside [0, class_count).
double loss(const ScIpnn& net, const Dataset& data);
double loss(const ScIpnn& net, const Dataset& data, std::span<const std::size_t> batch);

/// Analytic gradient of the mean loss over the batch, laid out like get_params().
ParamVector phase_gradients(const ScIpnn& net, const Dataset& data);
ParamVector phase_gradients(const ScIpnn& net, const Dataset& data, std::span<const std::size_t> batch);

/// Index of the largest score, lowest index on ties.
int predict(const ScIpnn& net, const ComplexVector& x);

/// Fraction of items whose prediction equals the label.
double evaluate(const ScIpnn& net, const Dataset& data);

}  // namespace champ
