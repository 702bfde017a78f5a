#pragma once

#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idps/data.hpp"
#include "idps/mlp.hpp"
#include "idps/random.hpp"

namespace idps::testing {

#ifdef IDPS_TEST_TMPDIR
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::path(IDPS_TEST_TMPDIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}
#endif

/// n rows of uniform [0,1) features with labels drawn uniformly from k classes.
inline Dataset random_dataset(std::size_t n, std::size_t dim, int k, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.features = Matrix(0, dim);
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = rng.uniform01();
    d.push_back(row, static_cast<ClassId>(rng.below(static_cast<std::uint64_t>(k))));
  }
  return d;
}

/// Componentwise relative comparison with an absolute floor. `worst` gets the
/// largest relative difference among components above the floor.
inline bool gradients_close(const Gradient& a, const Gradient& b, double rel, double abs_floor,
                            double* worst = nullptr) {
  double w = 0.0;
  bool ok = true;
  auto check = [&](double x, double y) {
    const double diff = std::abs(x - y);
    const double scale = std::max(std::abs(x), std::abs(y));
    if (diff > abs_floor && diff > rel * scale) ok = false;
    if (diff > abs_floor && scale > 0.0) w = std::max(w, diff / scale);
  };
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const auto wa = a.layers[l].weights.values();
    const auto wb = b.layers[l].weights.values();
    for (std::size_t i = 0; i < wa.size(); ++i) check(wa[i], wb[i]);
    for (std::size_t i = 0; i < a.layers[l].bias.size(); ++i)
      check(a.layers[l].bias[i], b.layers[l].bias[i]);
  }
  if (worst) *worst = w;
  return ok;
}

/// Sample loss mean_k (y_k - t_k)^2 evaluated directly from forward().
inline double sample_loss(const Network& net, std::span<const double> x,
                          std::span<const double> target) {
  const auto y = forward(net, x);
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) s += (y[k] - target[k]) * (y[k] - target[k]);
  return s / static_cast<double>(y.size());
}

/// Central finite-difference gradient of sample_loss, one parameter at a time.
inline Gradient numeric_gradient(const Network& net, std::span<const double> x,
                                 std::span<const double> target, double h = 1e-5) {
  auto probe = net;
  auto g = Gradient::zeros_like(net);
  auto diff = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = sample_loss(probe, x, target);
    param = saved - h;
    const double down = sample_loss(probe, x, target);
    param = saved;
    return (up - down) / (2.0 * h);
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto w = probe.layers[l].weights.values();
    auto gw = g.layers[l].weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) gw[i] = diff(w[i]);
    for (std::size_t i = 0; i < probe.layers[l].bias.size(); ++i)
      g.layers[l].bias[i] = diff(probe.layers[l].bias[i]);
  }
  return g;
}

}  // namespace idps::testing
