#pragma once

// Multilayer perceptron with tanh hidden layers and a softmax output,
// trained against one-hot targets under mean squared error.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "idps/data.hpp"

namespace idps {

enum class Activation { tanh, softmax };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct NetworkLayout {
  std::size_t input_size = kFeatureCount;
  std::vector<std::size_t> hidden_sizes{20};
  std::size_t output_size = static_cast<std::size_t>(kClassCount);
  Activation hidden_activation = Activation::tanh;
  Activation output_activation = Activation::softmax;

  /// Throws DimensionError when a size is zero or there is no hidden layer.
  void validate() const;

  std::size_t layer_count() const noexcept { return hidden_sizes.size() + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;

  friend bool operator==(const NetworkLayout&, const NetworkLayout&) = default;
};

// Weights are fan_out x fan_in so that a layer computes W * a + b.
struct LayerParams {
  Matrix weights;
  std::vector<double> bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct Network {
  NetworkLayout layout;
  std::vector<LayerParams> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const Network&, const Network&) = default;
};

// Same shapes as the network's parameters.
struct Gradient {
  std::vector<LayerParams> layers;

  static Gradient zeros_like(const Network& net);
  void set_zero();
  Gradient& operator+=(const Gradient& other);
  Gradient& operator*=(double s);
  double squared_norm() const;
};

/// Glorot-uniform weights in (-r, r) with r = sqrt(6 / (fan_in + fan_out)),
/// zero biases. Bit-identical for equal seeds.
Network init_network(const NetworkLayout& layout, std::uint64_t seed);

/// Network with every weight and bias zero.
Network zero_network(const NetworkLayout& layout);

// Reusable buffers for single-sample passes. Not shareable between threads.
class Workspace {
 public:
  explicit Workspace(const NetworkLayout& layout);

  std::span<const double> output() const { return activations_.back(); }

 private:
  friend void forward_into(const Network&, std::span<const double>, Workspace&);
  friend double accumulate_backward(const Network&, std::span<const double>, ClassId,
                                    Workspace&, Gradient&);
  friend double accumulate_backward(const Network&, std::span<const double>,
                                    std::span<const double>, Workspace&, Gradient&);

  // activations_[0] is the input, activations_[l + 1] the output of layer l
  std::vector<std::vector<double>> activations_;
  std::vector<std::vector<double>> deltas_;
};

void forward_into(const Network& net, std::span<const double> x, Workspace& ws);

/// Runs forward_into, then adds this sample's loss gradient to `acc`.
/// Returns the sample loss mean_k (y_k - t_k)^2.
double accumulate_backward(const Network& net, std::span<const double> x,
                           std::span<const double> target, Workspace& ws, Gradient& acc);

/// One-hot target variant; avoids materializing the target vector.
double accumulate_backward(const Network& net, std::span<const double> x, ClassId label,
                           Workspace& ws, Gradient& acc);

std::vector<double> forward(const Network& net, std::span<const double> x);

/// Gradient of the single-sample loss mean_k (y_k - t_k)^2.
Gradient backward(const Network& net, std::span<const double> x, std::span<const double> target);

/// Mean over samples and output components of the squared error.
double loss_mse(const std::vector<std::vector<double>>& outputs,
                const std::vector<std::vector<double>>& targets);

/// Index of the largest element; the lowest index wins ties.
ClassId argmax(std::span<const double> values);

ClassId predict_class(const Network& net, std::span<const double> x);

/// Numerically stable softmax, in place.
void softmax(std::span<double> z);

}  // namespace idps
