#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace idps {

using ClassId = int;

inline constexpr std::size_t kFeatureCount = 41;
inline constexpr int kClassCount = 6;

// Dense row-major matrix of doubles. Used for weights and for sample blocks.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void append_row(std::span<const double> r) {
    assert(rows_ == 0 || r.size() == cols_);
    if (rows_ == 0) cols_ = r.size();
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }
  void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A block of labelled samples: one feature row per sample plus its class.
struct Dataset {
  Matrix features;
  std::vector<ClassId> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::size_t dim() const noexcept { return features.cols(); }
  std::span<const double> row(std::size_t i) const { return features.row(i); }

  void push_back(std::span<const double> x, ClassId y) {
    features.append_row(x);
    labels.push_back(y);
  }

  /// Per-class sample counts for classes 0..k-1.
  std::vector<std::size_t> class_counts(int k = kClassCount) const;

  /// Rows at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace idps
