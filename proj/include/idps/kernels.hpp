#pragma once

// Data-parallel batch passes over a dataset.
//
// Two implementations share each signature. The `serial` namespace holds the
// straightforward reference loops used by the tests; the `parallel` versions
// are OpenMP kernels used by the trainer and evaluator.
//
// Parallel reductions are bit-reproducible for any thread count: samples are
// cut into fixed chunks of kChunkSize, each chunk is summed in sample order,
// and chunk partials are combined by a fixed pairwise tree.

#include <cstddef>
#include <span>

#include "idps/data.hpp"
#include "idps/mlp.hpp"

namespace idps::kernels {

inline constexpr std::size_t kChunkSize = 256;

struct BatchGradient {
  double loss = 0.0;  // mean per-sample loss
  Gradient grad;      // gradient of `loss`
};

namespace serial {

BatchGradient batch_gradient(const Network& net, const Dataset& data,
                             std::span<const std::size_t> rows = {});
double batch_mse(const Network& net, const Dataset& data);
Matrix batch_forward(const Network& net, const Matrix& inputs);

}  // namespace serial

namespace parallel {

/// Mean loss and gradient over `rows` (all rows when empty).
BatchGradient batch_gradient(const Network& net, const Dataset& data,
                             std::span<const std::size_t> rows = {});
double batch_mse(const Network& net, const Dataset& data);
/// One output row per input row.
Matrix batch_forward(const Network& net, const Matrix& inputs);

}  // namespace parallel

}  // namespace idps::kernels
