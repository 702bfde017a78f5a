#include <doctest.h>

#include <cmath>

#include "idps/dataset.hpp"
#include "idps/error.hpp"
#include "idps/mlp.hpp"
#include "test_util.hpp"

using namespace idps;

namespace {

NetworkLayout layout_of(std::size_t in, std::vector<std::size_t> hidden, std::size_t out) {
  NetworkLayout l;
  l.input_size = in;
  l.hidden_sizes = std::move(hidden);
  l.output_size = out;
  return l;
}

std::vector<double> random_input(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform01();
  return x;
}

}  // namespace

TEST_CASE("init_network shapes, range and determinism") {
  const NetworkLayout l;
  const auto a = init_network(l, 7);
  const auto b = init_network(l, 7);
  CHECK(a == b);
  REQUIRE(a.layers.size() == 2);
  CHECK(a.layers[0].weights.rows() == 20);
  CHECK(a.layers[0].weights.cols() == 41);
  CHECK(a.layers[1].weights.rows() == 6);
  CHECK(a.layers[1].weights.cols() == 20);
  CHECK(a.layers[0].bias.size() == 20);
  CHECK(a.layers[1].bias.size() == 6);
  CHECK(a.parameter_count() == 20 * 41 + 20 + 6 * 20 + 6);
  for (std::size_t layer = 0; layer < 2; ++layer) {
    const double r = std::sqrt(6.0 / static_cast<double>(l.fan_in(layer) + l.fan_out(layer)));
    for (double w : a.layers[layer].weights.values()) CHECK(std::abs(w) < r);
    for (double v : a.layers[layer].bias) CHECK(v == 0.0);
  }
  CHECK_FALSE(init_network(l, 8) == a);
}

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(layout_of(41, {}, 6).validate(), DimensionError);
  CHECK_THROWS_AS(layout_of(41, {0}, 6).validate(), DimensionError);
  CHECK_THROWS_AS(layout_of(0, {3}, 6).validate(), DimensionError);
  CHECK_NOTHROW(layout_of(41, {5, 4}, 6).validate());
}

TEST_CASE("zero network outputs the uniform distribution and predicts class 0") {
  const auto net = zero_network(NetworkLayout{});
  Rng rng(1);
  const auto x = random_input(rng, 41);
  for (double y : forward(net, x)) CHECK(y == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(predict_class(net, x) == 0);
}

TEST_CASE("softmax outputs are probability vectors") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto net = init_network(layout_of(41, {3 + static_cast<std::size_t>(trial % 7)}, 6),
                                  static_cast<std::uint64_t>(trial));
    const auto y = forward(net, random_input(rng, 41));
    double s = 0.0;
    for (double v : y) {
      CHECK(v > 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("hand-computed forward pass through one hidden unit") {
  auto net = zero_network(layout_of(2, {1}, 2));
  net.layers[0].weights(0, 0) = 0.5;
  net.layers[0].weights(0, 1) = -0.25;
  net.layers[0].bias[0] = 0.1;
  net.layers[1].weights(0, 0) = 1.0;
  net.layers[1].weights(1, 0) = -1.0;
  net.layers[1].bias[1] = 1.0;
  // z = 0.5 - 0.5 + 0.1, h = tanh(0.1) = 0.099668
  // softmax([0.099668, 0.900332]) = [0.309884, 0.690117]
  const auto y = forward(net, std::vector<double>{1.0, 2.0});
  CHECK(y[0] == doctest::Approx(0.310).epsilon(0.0005 / 0.310));
  CHECK(y[1] == doctest::Approx(0.690).epsilon(0.0005 / 0.690));
  CHECK(std::round(y[0] * 1000) == 310);
  CHECK(std::round(y[1] * 1000) == 690);
}

TEST_CASE("softmax is stable and shift invariant") {
  std::vector<double> z{1000.0, 1001.0, 999.0};
  softmax(z);
  CHECK(std::isfinite(z[0]));
  CHECK(z[1] > z[0]);
  CHECK(z[0] > z[2]);
  std::vector<double> a{0.3, -1.2, 2.0, 0.0, 0.5, 1.9};
  std::vector<double> b = a;
  for (auto& v : b) v += 37.5;
  softmax(a);
  softmax(b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("argmax and predict_class") {
  CHECK(argmax(std::vector<double>{0.1, 0.7, 0.05, 0.05, 0.05, 0.05}) == 1);
  CHECK(argmax(std::vector<double>{0.2, 0.2, 0.2}) == 0);
  CHECK(argmax(std::vector<double>{0.1, 0.3, 0.3}) == 1);

  // adding a constant to every output bias shifts all pre-softmax values equally
  auto net = init_network(NetworkLayout{}, 3);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_input(rng, 41);
    const auto before = predict_class(net, x);
    auto shifted = net;
    for (auto& b : shifted.layers.back().bias) b += 3.25;
    CHECK(predict_class(shifted, x) == before);
  }
}

TEST_CASE("loss_mse") {
  const std::vector<std::vector<double>> t = {{1, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}};
  CHECK(loss_mse(t, t) == 0.0);
  const std::vector<std::vector<double>> u(2, std::vector<double>(6, 1.0 / 6.0));
  CHECK(loss_mse(u, t) == doctest::Approx(5.0 / 36.0).epsilon(1e-14));

  std::vector<std::vector<double>> y = {{0.5, 0.1, 0.1, 0.1, 0.1, 0.1}, {0.2, 0.0, 0.3, 0.3, 0.2, 0.0}};
  auto half = y;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t k = 0; k < 6; ++k) half[i][k] = t[i][k] + 0.5 * (y[i][k] - t[i][k]);
  CHECK(loss_mse(half, t) == doctest::Approx(loss_mse(y, t) / 4.0).epsilon(1e-14));

  CHECK_THROWS_AS(loss_mse({{1, 0}}, {{1, 0}, {0, 1}}), DimensionError);
  CHECK_THROWS_AS(loss_mse({{1, 0, 0}}, {{1, 0}}), DimensionError);
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = init_network(layout_of(41, {5}, 6), 100 + static_cast<std::uint64_t>(trial));
    const auto x = random_input(rng, 41);
    const auto t = one_hot(static_cast<ClassId>(rng.below(6)), 6);
    const auto analytic = backward(net, x, t);
    const auto numeric = testing::numeric_gradient(net, x, t);
    double worst = 0.0;
    CHECK(testing::gradients_close(analytic, numeric, 1e-6, 1e-9, &worst));
  }
}

TEST_CASE("backward on deeper and non-one-hot targets") {
  Rng rng(12);
  const auto net = init_network(layout_of(7, {6, 4}, 3), 5);
  const auto x = random_input(rng, 7);
  const std::vector<double> t{0.2, 0.5, 0.3};
  CHECK(testing::gradients_close(backward(net, x, t), testing::numeric_gradient(net, x, t), 1e-6,
                                 1e-9));
}

TEST_CASE("gradient vanishes when the output equals the target") {
  const auto net = init_network(NetworkLayout{}, 9);
  Rng rng(3);
  const auto x = random_input(rng, 41);
  const auto y = forward(net, x);
  const auto g = backward(net, x, y);
  CHECK(g.squared_norm() <= 1e-24);
}

TEST_CASE("dead input column gets a zero weight gradient") {
  const auto net = init_network(layout_of(5, {4}, 3), 2);
  std::vector<double> x{0.3, 0.0, 0.7, 0.1, 0.9};
  const auto g = backward(net, x, std::vector<double>{0.0, 1.0, 0.0});
  for (std::size_t j = 0; j < 4; ++j) CHECK(g.layers[0].weights(j, 1) == 0.0);
  CHECK(g.squared_norm() > 0.0);
}

TEST_CASE("one-hot and explicit-target backward agree") {
  const auto net = init_network(NetworkLayout{}, 21);
  Rng rng(8);
  const auto x = random_input(rng, 41);
  Workspace ws(net.layout);
  auto a = Gradient::zeros_like(net);
  auto b = Gradient::zeros_like(net);
  const auto t = one_hot(4, 6);
  const double la = accumulate_backward(net, x, 4, ws, a);
  const double lb = accumulate_backward(net, x, t, ws, b);
  CHECK(la == lb);
  CHECK(a.layers == b.layers);
  CHECK(la == doctest::Approx(testing::sample_loss(net, x, t)).epsilon(1e-14));
}

TEST_CASE("dimension mismatches are rejected") {
  const auto net = init_network(NetworkLayout{}, 1);
  CHECK_THROWS_AS(forward(net, std::vector<double>(40, 0.0)), DimensionError);
  CHECK_THROWS_AS(backward(net, std::vector<double>(41, 0.0), std::vector<double>(5, 0.0)),
                  DimensionError);
}
