#include "idps/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "idps/error.hpp"
#include "idps/random.hpp"

namespace idps {

std::string_view activation_name(Activation a) {
  return a == Activation::tanh ? "tanh" : "softmax";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "softmax") return Activation::softmax;
  throw FormatError("unknown activation '" + std::string(name) + "'");
}

void NetworkLayout::validate() const {
  if (input_size == 0 || output_size == 0) throw DimensionError("layer sizes must be positive");
  if (hidden_sizes.empty()) throw DimensionError("an MLP needs at least one hidden layer");
  for (auto h : hidden_sizes)
    if (h == 0) throw DimensionError("hidden layer sizes must be positive");
  if (hidden_activation != Activation::tanh || output_activation != Activation::softmax)
    throw DimensionError("only tanh hidden layers with a softmax output are supported");
}

std::size_t NetworkLayout::fan_in(std::size_t layer) const {
  return layer == 0 ? input_size : hidden_sizes.at(layer - 1);
}

std::size_t NetworkLayout::fan_out(std::size_t layer) const {
  return layer < hidden_sizes.size() ? hidden_sizes[layer] : output_size;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

bool Network::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto& l : layers) {
    if (!std::all_of(l.weights.values().begin(), l.weights.values().end(), finite)) return false;
    if (!std::all_of(l.bias.begin(), l.bias.end(), finite)) return false;
  }
  return true;
}

Gradient Gradient::zeros_like(const Network& net) {
  Gradient g;
  g.layers.reserve(net.layers.size());
  for (const auto& l : net.layers)
    g.layers.push_back({Matrix(l.weights.rows(), l.weights.cols()),
                        std::vector<double>(l.bias.size(), 0.0)});
  return g;
}

void Gradient::set_zero() {
  for (auto& l : layers) {
    std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

Gradient& Gradient::operator+=(const Gradient& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto dst = layers[l].weights.values();
    auto src = other.layers[l].weights.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    for (std::size_t i = 0; i < layers[l].bias.size(); ++i) layers[l].bias[i] += other.layers[l].bias[i];
  }
  return *this;
}

Gradient& Gradient::operator*=(double s) {
  for (auto& l : layers) {
    for (auto& v : l.weights.values()) v *= s;
    for (auto& v : l.bias) v *= s;
  }
  return *this;
}

double Gradient::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) {
    for (double v : l.weights.values()) s += v * v;
    for (double v : l.bias) s += v * v;
  }
  return s;
}

Network zero_network(const NetworkLayout& layout) {
  layout.validate();
  Network net;
  net.layout = layout;
  for (std::size_t l = 0; l < layout.layer_count(); ++l)
    net.layers.push_back({Matrix(layout.fan_out(l), layout.fan_in(l)),
                          std::vector<double>(layout.fan_out(l), 0.0)});
  return net;
}

Network init_network(const NetworkLayout& layout, std::uint64_t seed) {
  Network net = zero_network(layout);
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layout.fan_in(l) + layout.fan_out(l)));
    for (auto& w : net.layers[l].weights.values()) w = rng.symmetric(limit);
  }
  return net;
}

Workspace::Workspace(const NetworkLayout& layout) {
  activations_.emplace_back(layout.input_size, 0.0);
  for (std::size_t l = 0; l < layout.layer_count(); ++l) {
    activations_.emplace_back(layout.fan_out(l), 0.0);
    deltas_.emplace_back(layout.fan_out(l), 0.0);
  }
}

void softmax(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

void forward_into(const Network& net, std::span<const double> x, Workspace& ws) {
  if (x.size() != net.layout.input_size)
    throw DimensionError("network expects " + std::to_string(net.layout.input_size) +
                         " inputs, got " + std::to_string(x.size()));
  std::copy(x.begin(), x.end(), ws.activations_[0].begin());
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& in = ws.activations_[l];
    auto& out = ws.activations_[l + 1];
    for (std::size_t j = 0; j < out.size(); ++j) {
      const auto w = layer.weights.row(j);
      double z = layer.bias[j];
      for (std::size_t i = 0; i < in.size(); ++i) z += w[i] * in[i];
      out[j] = z;
    }
    if (l == last) {
      softmax(out);
    } else {
      for (auto& v : out) v = std::tanh(v);
    }
  }
}

namespace {

// Shared tail of both accumulate_backward overloads: expects deltas_.back()
// to hold dLoss/dOutput and turns it into the softmax pre-activation delta
// before propagating.
void propagate(const Network& net, std::vector<std::vector<double>>& acts,
               std::vector<std::vector<double>>& deltas, Gradient& acc) {
  const std::size_t last = net.layers.size() - 1;
  {
    const auto& y = acts.back();
    auto& d = deltas[last];
    double dot = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) dot += d[k] * y[k];
    for (std::size_t k = 0; k < y.size(); ++k) d[k] = y[k] * (d[k] - dot);
  }
  for (std::size_t l = last + 1; l-- > 0;) {
    const auto& d = deltas[l];
    const auto& in = acts[l];
    auto& g = acc.layers[l];
    for (std::size_t j = 0; j < d.size(); ++j) {
      auto gw = g.weights.row(j);
      const double dj = d[j];
      for (std::size_t i = 0; i < in.size(); ++i) gw[i] += dj * in[i];
      g.bias[j] += dj;
    }
    if (l == 0) break;
    auto& prev = deltas[l - 1];
    const auto& w = net.layers[l].weights;
    std::fill(prev.begin(), prev.end(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      const auto wr = w.row(j);
      const double dj = d[j];
      for (std::size_t i = 0; i < prev.size(); ++i) prev[i] += wr[i] * dj;
    }
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= 1.0 - in[i] * in[i];
  }
}

}  // namespace

double accumulate_backward(const Network& net, std::span<const double> x,
                           std::span<const double> target, Workspace& ws, Gradient& acc) {
  forward_into(net, x, ws);
  const auto& y = ws.activations_.back();
  if (target.size() != y.size())
    throw DimensionError("target has " + std::to_string(target.size()) + " components, expected " +
                         std::to_string(y.size()));
  const double k = static_cast<double>(y.size());
  auto& d = ws.deltas_.back();
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - target[i];
    loss += e * e;
    d[i] = 2.0 * e / k;
  }
  propagate(net, ws.activations_, ws.deltas_, acc);
  return loss / k;
}

double accumulate_backward(const Network& net, std::span<const double> x, ClassId label,
                           Workspace& ws, Gradient& acc) {
  forward_into(net, x, ws);
  const auto& y = ws.activations_.back();
  if (label < 0 || static_cast<std::size_t>(label) >= y.size())
    throw RangeError("label " + std::to_string(label) + " outside the output range");
  const double k = static_cast<double>(y.size());
  auto& d = ws.deltas_.back();
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (static_cast<ClassId>(i) == label ? 1.0 : 0.0);
    loss += e * e;
    d[i] = 2.0 * e / k;
  }
  propagate(net, ws.activations_, ws.deltas_, acc);
  return loss / k;
}

std::vector<double> forward(const Network& net, std::span<const double> x) {
  Workspace ws(net.layout);
  forward_into(net, x, ws);
  return {ws.output().begin(), ws.output().end()};
}

Gradient backward(const Network& net, std::span<const double> x, std::span<const double> target) {
  Workspace ws(net.layout);
  auto g = Gradient::zeros_like(net);
  accumulate_backward(net, x, target, ws, g);
  return g;
}

double loss_mse(const std::vector<std::vector<double>>& outputs,
                const std::vector<std::vector<double>>& targets) {
  if (outputs.size() != targets.size())
    throw DimensionError("loss_mse: " + std::to_string(outputs.size()) + " outputs vs " +
                         std::to_string(targets.size()) + " targets");
  if (outputs.empty()) throw DimensionError("loss_mse: no samples");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    if (outputs[s].size() != targets[s].size())
      throw DimensionError("loss_mse: sample " + std::to_string(s) + " has mismatched width");
    for (std::size_t k = 0; k < outputs[s].size(); ++k) {
      const double e = outputs[s][k] - targets[s][k];
      sum += e * e;
    }
    count += outputs[s].size();
  }
  return sum / static_cast<double>(count);
}

ClassId argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<ClassId>(best);
}

ClassId predict_class(const Network& net, std::span<const double> x) {
  Workspace ws(net.layout);
  forward_into(net, x, ws);
  return argmax(ws.output());
}

}  // namespace idps
