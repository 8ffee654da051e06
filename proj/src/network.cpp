#include "champ/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace champ {

void validate_dataset(const Dataset& data) {
  if (data.features.size() != data.labels.size()) {
    throw std::invalid_argument("dataset: feature and label counts differ");
  }
  const auto dim = data.feature_dim();
  for (const auto& f : data.features) {
    if (f.size() != dim) throw std::invalid_argument("dataset: feature lengths are not uniform");
  }
}

std::vector<int> ScIpnn::dims() const {
  std::vector<int> d;
  if (layers.empty()) return d;
  d.push_back(layers.front().in_dim());
  for (const auto& l : layers) d.push_back(l.out_dim());
  return d;
}

std::size_t ScIpnn::phase_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.phase_count();
  return n;
}

void validate_network(const ScIpnn& net) {
  if (net.layers.empty()) throw std::invalid_argument("network: no layers");
  for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
    if (net.layers[i].out_dim() != net.layers[i + 1].in_dim()) {
      throw std::invalid_argument("network: layer " + std::to_string(i) +
                                  " output does not chain into the next layer");
    }
  }
  for (const auto& l : net.layers) {
    if (l.rank() != static_cast<std::size_t>(std::min(l.in_dim(), l.out_dim()))) {
      throw std::invalid_argument("network: gain vector length does not match layer rank");
    }
  }
  if (net.activation.biases.size() + 1 != net.layers.size()) {
    throw std::invalid_argument("network: expected one activation bias per hidden layer");
  }
  for (double b : net.activation.biases) {
    if (!std::isfinite(b)) throw std::invalid_argument("network: non-finite activation bias");
  }
  if (net.class_count < 1 || net.class_count > net.layers.back().out_dim()) {
    throw std::invalid_argument("network: class_count must be in [1, last out_dim]");
  }
}

ScIpnn make_network(std::span<const int> dims, int class_count, double bias, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("make_network: need at least two dimensions");
  ScIpnn net;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i + 1] < 1) throw std::invalid_argument("make_network: dimension < 1");
    SvdLayer layer = make_layer(dims[i], dims[i + 1]);
    for (auto* mesh : {&layer.mesh_v, &layer.mesh_u}) {
      std::vector<double> p(mesh->phase_count());
      // uniform_real_distribution yields [−π, π); flip the closed end over.
      for (auto& v : p) {
        v = angle(rng);
        if (v <= -kPi) v = kPi;
      }
      mesh->set_phases(p);
    }
    net.layers.push_back(std::move(layer));
  }
  net.activation.biases.assign(net.layers.size() - 1, bias);
  net.class_count = class_count;
  validate_network(net);
  return net;
}

std::vector<MeshSlice> mesh_slices(const ScIpnn& net) {
  std::vector<MeshSlice> out;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto nv = net.layers[i].mesh_v.phase_count();
    out.push_back({i, 'v', offset, nv});
    offset += nv;
    const auto nu = net.layers[i].mesh_u.phase_count();
    out.push_back({i, 'u', offset, nu});
    offset += nu;
  }
  return out;
}

ParamVector get_params(const ScIpnn& net) {
  ParamVector p;
  p.values.reserve(net.phase_count());
  for (const auto& l : net.layers) {
    l.mesh_v.write_phases(p.values);
    l.mesh_u.write_phases(p.values);
  }
  p.phase_count = p.values.size();
  for (const auto& l : net.layers) p.values.insert(p.values.end(), l.gain_params.begin(), l.gain_params.end());
  p.gain_count = p.values.size() - p.phase_count;
  p.values.insert(p.values.end(), net.activation.biases.begin(), net.activation.biases.end());
  p.bias_count = net.activation.biases.size();
  return p;
}

void set_params(ScIpnn& net, const ParamVector& params) {
  const auto ref = get_params(net);
  if (params.phase_count != ref.phase_count || params.gain_count != ref.gain_count ||
      params.bias_count != ref.bias_count || params.values.size() != ref.values.size()) {
    throw std::invalid_argument("set_params: layout does not match the network");
  }
  set_phase_vector(net, params.phases());
  std::size_t k = params.phase_count;
  for (auto& l : net.layers) {
    for (auto& g : l.gain_params) g = params.values[k++];
  }
  for (auto& b : net.activation.biases) b = params.values[k++];
}

std::vector<double> phase_vector(const ScIpnn& net) {
  std::vector<double> out;
  out.reserve(net.phase_count());
  for (const auto& l : net.layers) {
    l.mesh_v.write_phases(out);
    l.mesh_u.write_phases(out);
  }
  return out;
}

void set_phase_vector(ScIpnn& net, std::span<const double> phases) {
  if (phases.size() != net.phase_count()) {
    throw std::invalid_argument("set_phase_vector: expected " + std::to_string(net.phase_count()) +
                                " phases, got " + std::to_string(phases.size()));
  }
  std::size_t k = 0;
  for (auto& l : net.layers) {
    for (auto* mesh : {&l.mesh_v, &l.mesh_u}) {
      const auto n = mesh->phase_count();
      mesh->set_phases(phases.subspan(k, n));
      k += n;
    }
  }
}

ComplexVector modrelu(const ComplexVector& z, double bias) {
  ComplexVector a(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double r = std::abs(z(k));
    a(k) = (r + bias <= 0.0 || r == 0.0) ? Complex{} : (r + bias) * (z(k) / r);
  }
  return a;
}

namespace {

constexpr Complex kI{0.0, 1.0};

// Transfer blocks of one mesh evaluated once and reused across a batch.
struct CompiledMesh {
  int size = 0;
  std::vector<int> ports;
  std::vector<Mat2> t;
  std::vector<Mat2> dtheta;
  std::vector<Mat2> dphi;
  std::vector<Complex> out_phase;

  CompiledMesh(const UnitaryMesh& mesh, bool derivatives) : size(mesh.size()) {
    const auto n = mesh.mzi_count();
    ports.reserve(n);
    t.reserve(n);
    for (const auto& m : mesh.mzis()) {
      ports.push_back(m.top_port);
      t.push_back(mzi_transfer(m.theta, m.phi));
      if (derivatives) {
        dtheta.push_back(mzi_transfer_dtheta(m.theta, m.phi));
        dphi.push_back(mzi_transfer_dphi(m.theta, m.phi));
      }
    }
    for (double psi : mesh.output_phases()) out_phase.push_back(std::polar(1.0, psi));
  }

  // In-place forward; when `pairs` is given, records each MZI's input pair.
  void apply(ComplexVector& y, std::vector<Complex>* pairs) const {
    if (pairs) pairs->resize(2 * t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
      Complex& a = y(ports[j]);
      Complex& b = y(ports[j] + 1);
      if (pairs) {
        (*pairs)[2 * j] = a;
        (*pairs)[2 * j + 1] = b;
      }
      const Mat2& m = t[j];
      const Complex na = m(0, 0) * a + m(0, 1) * b;
      const Complex nb = m(1, 0) * a + m(1, 1) * b;
      a = na;
      b = nb;
    }
    for (int k = 0; k < size; ++k) y(k) *= out_phase[k];
  }

  // g holds ∂L/∂out on entry and ∂L/∂in on exit. Phase gradients are
  // accumulated into grad (canonical order).
  void backward(ComplexVector& g, const ComplexVector& out, const std::vector<Complex>& pairs,
                std::span<double> grad) const {
    const std::size_t psi0 = 2 * t.size();
    for (int k = 0; k < size; ++k) {
      grad[psi0 + k] += std::real(std::conj(g(k)) * (kI * out(k)));
      g(k) *= std::conj(out_phase[k]);
    }
    for (std::size_t jj = t.size(); jj-- > 0;) {
      Complex& ga = g(ports[jj]);
      Complex& gb = g(ports[jj] + 1);
      const Complex xa = pairs[2 * jj];
      const Complex xb = pairs[2 * jj + 1];
      const Mat2& dt = dtheta[jj];
      const Mat2& dp = dphi[jj];
      grad[2 * jj] += std::real(std::conj(ga) * (dt(0, 0) * xa + dt(0, 1) * xb) +
                                std::conj(gb) * (dt(1, 0) * xa + dt(1, 1) * xb));
      grad[2 * jj + 1] += std::real(std::conj(ga) * (dp(0, 0) * xa) + std::conj(gb) * (dp(1, 0) * xa));
      const Mat2& m = t[jj];
      const Complex na = std::conj(m(0, 0)) * ga + std::conj(m(1, 0)) * gb;
      const Complex nb = std::conj(m(0, 1)) * ga + std::conj(m(1, 1)) * gb;
      ga = na;
      gb = nb;
    }
  }
};

struct CompiledLayer {
  CompiledMesh v;
  CompiledMesh u;
  std::vector<double> sigma;

  CompiledLayer(const SvdLayer& l, bool derivatives)
      : v(l.mesh_v, derivatives), u(l.mesh_u, derivatives), sigma(l.sigmas()) {}
};

struct LayerTape {
  std::vector<Complex> v_pairs;
  ComplexVector t;  // mesh_v output
  std::vector<Complex> u_pairs;
  ComplexVector z;  // mesh_u output (pre-activation)
};

class CompiledNet {
 public:
  CompiledNet(const ScIpnn& net, bool derivatives) : net_(net) {
    validate_network(net);
    layers_.reserve(net.layers.size());
    for (const auto& l : net.layers) layers_.emplace_back(l, derivatives);
    slices_ = mesh_slices(net);
    std::size_t offset = net.phase_count();
    for (const auto& cl : layers_) {
      gain_offsets_.push_back(offset);
      offset += cl.sigma.size();
    }
  }

  // Returns the final-layer output z; fills tapes when given.
  ComplexVector run(const ComplexVector& x, std::vector<LayerTape>* tapes) const {
    if (x.size() != net_.input_dim()) {
      throw std::invalid_argument("forward: input length " + std::to_string(x.size()) +
                                  " does not match network input " + std::to_string(net_.input_dim()));
    }
    if (tapes) tapes->resize(layers_.size());
    ComplexVector a = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& cl = layers_[i];
      LayerTape* tape = tapes ? &(*tapes)[i] : nullptr;
      cl.v.apply(a, tape ? &tape->v_pairs : nullptr);
      if (tape) tape->t = a;
      ComplexVector mid = ComplexVector::Zero(cl.u.size);
      for (std::size_t k = 0; k < cl.sigma.size(); ++k) mid(k) = cl.sigma[k] * a(k);
      cl.u.apply(mid, tape ? &tape->u_pairs : nullptr);
      if (tape) tape->z = mid;
      a = (i + 1 < layers_.size()) ? modrelu(mid, net_.activation.biases[i]) : std::move(mid);
    }
    return a;
  }

  std::vector<double> scores(const ComplexVector& z) const {
    std::vector<double> s(static_cast<std::size_t>(net_.class_count));
    for (int k = 0; k < net_.class_count; ++k) s[k] = std::norm(z(k));
    return s;
  }

  // Adds this sample's loss gradient into grad; returns the loss.
  double accumulate(const ComplexVector& x, int label, ParamVector& grad) const {
    std::vector<LayerTape> tapes;
    const ComplexVector out = run(x, &tapes);
    const auto s = scores(out);
    const auto p = softmax(s);
    const double l = sample_loss(s, label);

    ComplexVector g = ComplexVector::Zero(out.size());
    for (int k = 0; k < net_.class_count; ++k) {
      const double dl_ds = p[k] - (k == label ? 1.0 : 0.0);
      g(k) = 2.0 * dl_ds * out(k);
    }

    for (std::size_t i = layers_.size(); i-- > 0;) {
      const auto& cl = layers_[i];
      const auto& tape = tapes[i];
      if (i + 1 < layers_.size()) {
        // Through modReLU: g currently holds ∂L/∂a.
        const double b = net_.activation.biases[i];
        double db = 0.0;
        for (Eigen::Index k = 0; k < g.size(); ++k) {
          const Complex z = tape.z(k);
          const double r = std::abs(z);
          if (r == 0.0 || r + b <= 0.0) {
            g(k) = 0.0;
            continue;
          }
          const Complex unit = z / r;
          const Complex q = std::conj(g(k)) * unit;
          db += q.real();
          g(k) = std::conj(Complex{q.real(), (r + b) / r * q.imag()}) * unit;
        }
        grad.values[grad.phase_count + grad.gain_count + i] += db;
      }
      const auto& su = slices_[2 * i + 1];
      cl.u.backward(g, tape.z, tape.u_pairs, std::span<double>(grad.values).subspan(su.offset, su.length));
      ComplexVector gt = ComplexVector::Zero(cl.v.size);
      const auto& gains = net_.layers[i].gain_params;
      for (std::size_t k = 0; k < cl.sigma.size(); ++k) {
        const double dsigma = std::real(std::conj(g(k)) * tape.t(k));
        grad.values[gain_offsets_[i] + k] += 2.0 * gains[k] * dsigma;
        gt(k) = cl.sigma[k] * g(k);
      }
      const auto& sv = slices_[2 * i];
      cl.v.backward(gt, tape.t, tape.v_pairs, std::span<double>(grad.values).subspan(sv.offset, sv.length));
      g = std::move(gt);
    }
    return l;
  }

  static std::vector<double> softmax(const std::vector<double>& s) {
    const double m = *std::max_element(s.begin(), s.end());
    std::vector<double> p(s.size());
    double z = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) z += (p[k] = std::exp(s[k] - m));
    for (auto& v : p) v /= z;
    return p;
  }

  static double sample_loss(const std::vector<double>& s, int label) {
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - m);
    return m + std::log(z) - s[label];
  }

  void check_label(int label) const {
    if (label < 0 || label >= net_.class_count) {
      throw std::invalid_argument("label " + std::to_string(label) + " outside [0, " +
                                  std::to_string(net_.class_count) + ")");
    }
  }

 private:
  const ScIpnn& net_;
  std::vector<CompiledLayer> layers_;
  std::vector<MeshSlice> slices_;
  std::vector<std::size_t> gain_offsets_;
};

std::vector<std::size_t> all_indices(const Dataset& data) {
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

int argmax_lowest(const std::vector<double>& s) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(s.size()); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return best;
}

}  // namespace

std::vector<double> forward(const ScIpnn& net, const ComplexVector& x) {
  CompiledNet c(net, false);
  return c.scores(c.run(x, nullptr));
}

double loss(const ScIpnn& net, const Dataset& data) { return loss(net, data, all_indices(data)); }

double loss(const ScIpnn& net, const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  CompiledNet c(net, false);
  double total = 0.0;
  for (auto i : batch) {
    c.check_label(data.labels.at(i));
    total += CompiledNet::sample_loss(c.scores(c.run(data.features.at(i), nullptr)), data.labels[i]);
  }
  return total / static_cast<double>(batch.size());
}

ParamVector phase_gradients(const ScIpnn& net, const Dataset& data) {
  return phase_gradients(net, data, all_indices(data));
}

ParamVector phase_gradients(const ScIpnn& net, const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("phase_gradients: empty batch");
  CompiledNet c(net, true);
  ParamVector grad = get_params(net);
  std::fill(grad.values.begin(), grad.values.end(), 0.0);
  for (auto i : batch) {
    c.check_label(data.labels.at(i));
    c.accumulate(data.features.at(i), data.labels[i], grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : grad.values) v *= inv;
  return grad;
}

int predict(const ScIpnn& net, const ComplexVector& x) { return argmax_lowest(forward(net, x)); }

double evaluate(const ScIpnn& net, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  CompiledNet c(net, false);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    correct += argmax_lowest(c.scores(c.run(data.features[i], nullptr))) == data.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace champ
