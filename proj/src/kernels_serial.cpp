#include "idps/kernels.hpp"

#include "idps/error.hpp"

namespace idps::kernels::serial {

BatchGradient batch_gradient(const Network& net, const Dataset& data,
                             std::span<const std::size_t> rows) {
  const std::size_t n = rows.empty() ? data.size() : rows.size();
  if (n == 0) throw DimensionError("batch_gradient: empty batch");
  BatchGradient out{0.0, Gradient::zeros_like(net)};
  Workspace ws(net.layout);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t r = rows.empty() ? s : rows[s];
    out.loss += accumulate_backward(net, data.row(r), data.labels[r], ws, out.grad);
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.loss *= inv;
  out.grad *= inv;
  return out;
}

double batch_mse(const Network& net, const Dataset& data) {
  if (data.empty()) throw DimensionError("batch_mse: empty dataset");
  Workspace ws(net.layout);
  double sum = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    forward_into(net, data.row(r), ws);
    const auto y = ws.output();
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double e = y[k] - (static_cast<ClassId>(k) == data.labels[r] ? 1.0 : 0.0);
      sum += e * e;
    }
  }
  return sum / static_cast<double>(data.size() * net.layout.output_size);
}

Matrix batch_forward(const Network& net, const Matrix& inputs) {
  Matrix out(inputs.rows(), net.layout.output_size);
  Workspace ws(net.layout);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    forward_into(net, inputs.row(r), ws);
    const auto y = ws.output();
    std::copy(y.begin(), y.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace idps::kernels::serial
