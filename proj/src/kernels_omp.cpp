#include <omp.h>

#include <optional>
#include <vector>

#include "idps/error.hpp"
#include "idps/kernels.hpp"

namespace idps::kernels::parallel {

namespace {

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

// Fixed-shape pairwise tree: after the call parts[0] holds the total. The
// combination order depends only on parts.size().
template <class T, class Add>
void tree_reduce(std::vector<T>& parts, Add add) {
  const auto n = static_cast<std::ptrdiff_t>(parts.size());
  for (std::ptrdiff_t stride = 1; stride < n; stride *= 2) {
    const std::ptrdiff_t pairs = (n + 2 * stride - 1) / (2 * stride);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pairs; ++p) {
      const std::ptrdiff_t i = p * 2 * stride;
      if (i + stride < n) add(parts[static_cast<std::size_t>(i)], parts[static_cast<std::size_t>(i + stride)]);
    }
  }
}

}  // namespace

BatchGradient batch_gradient(const Network& net, const Dataset& data,
                             std::span<const std::size_t> rows) {
  const std::size_t n = rows.empty() ? data.size() : rows.size();
  if (n == 0) throw DimensionError("batch_gradient: empty batch");
  const std::size_t chunks = chunk_count(n);
  std::vector<Gradient> grads(chunks);
  std::vector<double> losses(chunks, 0.0);

  std::optional<std::string> failure;
#pragma omp parallel
  {
    Workspace ws(net.layout);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
      const auto ci = static_cast<std::size_t>(c);
      grads[ci] = Gradient::zeros_like(net);
      const std::size_t begin = ci * kChunkSize;
      const std::size_t end = std::min(n, begin + kChunkSize);
      try {
        double loss = 0.0;
        for (std::size_t s = begin; s < end; ++s) {
          const std::size_t r = rows.empty() ? s : rows[s];
          loss += accumulate_backward(net, data.row(r), data.labels[r], ws, grads[ci]);
        }
        losses[ci] = loss;
      } catch (const std::exception& e) {
#pragma omp critical(idps_kernel_error)
        if (!failure) failure = e.what();
      }
    }
  }
  if (failure) throw Error(*failure);

  tree_reduce(losses, [](double& a, double b) { a += b; });
  tree_reduce(grads, [](Gradient& a, const Gradient& b) { a += b; });

  const double inv = 1.0 / static_cast<double>(n);
  BatchGradient out{losses[0] * inv, std::move(grads[0])};
  out.grad *= inv;
  return out;
}

double batch_mse(const Network& net, const Dataset& data) {
  const std::size_t n = data.size();
  if (n == 0) throw DimensionError("batch_mse: empty dataset");
  const std::size_t chunks = chunk_count(n);
  std::vector<double> sums(chunks, 0.0);

  std::optional<std::string> failure;
#pragma omp parallel
  {
    Workspace ws(net.layout);
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const std::size_t begin = ci * kChunkSize;
      const std::size_t end = std::min(n, begin + kChunkSize);
      try {
        double sum = 0.0;
        for (std::size_t r = begin; r < end; ++r) {
          forward_into(net, data.row(r), ws);
          const auto y = ws.output();
          for (std::size_t k = 0; k < y.size(); ++k) {
            const double e = y[k] - (static_cast<ClassId>(k) == data.labels[r] ? 1.0 : 0.0);
            sum += e * e;
          }
        }
        sums[ci] = sum;
      } catch (const std::exception& e) {
#pragma omp critical(idps_kernel_error)
        if (!failure) failure = e.what();
      }
    }
  }
  if (failure) throw Error(*failure);

  tree_reduce(sums, [](double& a, double b) { a += b; });
  return sums[0] / static_cast<double>(n * net.layout.output_size);
}

Matrix batch_forward(const Network& net, const Matrix& inputs) {
  Matrix out(inputs.rows(), net.layout.output_size);
  if (inputs.rows() > 0 && inputs.cols() != net.layout.input_size)
    throw DimensionError("batch_forward: input width mismatch");
#pragma omp parallel
  {
    Workspace ws(net.layout);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(inputs.rows()); ++r) {
      const auto ri = static_cast<std::size_t>(r);
      forward_into(net, inputs.row(ri), ws);
      const auto y = ws.output();
      std::copy(y.begin(), y.end(), out.row(ri).begin());
    }
  }
  return out;
}

}  // namespace idps::kernels::parallel
