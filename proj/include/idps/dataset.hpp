#pragma once

// Partitioning, feature scaling and target encoding.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idps/data.hpp"

namespace idps {

struct SplitSpec {
  double train_fraction = 0.70;
  double val_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t seed = 1;
  bool shuffle = true;

  /// Throws RangeError unless all fractions are positive and sum to 1.
  void validate() const;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// Partition sizes for n records: val and test take round-half-up(n * f),
/// train takes the remainder.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
  // Source row of every partition member, in partition order.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
  std::vector<std::size_t> test_rows;
};

Split split_dataset(const Dataset& d, const SplitSpec& spec);

/// Deterministic class-proportional subsample of exactly n rows, returned in
/// source order. Per-class quotas use the largest-remainder rule.
Dataset stratified_sample(const Dataset& d, std::size_t n, std::uint64_t seed);

std::string split_report_text(const Split& s, int k = kClassCount);
std::string split_report_csv(const Split& s, int k = kClassCount);

// Per-feature min-max scaler, fit on the training partition only.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dim() const noexcept { return min.size(); }

  /// (v - min) / (max - min), clamped to [0, 1]; constant features map to 0.
  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> in) const;
  Dataset apply(const Dataset& d) const;

  /// Inverse map without clamping: min + v * (max - min).
  std::vector<double> unapply(std::span<const double> scaled) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

Scaler fit_scaler(const Dataset& train);

std::vector<double> one_hot(ClassId label, int k = kClassCount);

/// Encoded partitions on disk: one row per sample, the feature values
/// followed by the class id.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace idps
