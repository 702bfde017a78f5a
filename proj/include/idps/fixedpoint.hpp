#pragma once

// Integer-only model of the hardware inference path: saturating Q-format
// arithmetic, a 256-entry interpolated tanh table, and argmax over the raw
// output accumulators (softmax is monotone, so it is never evaluated).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idps/data.hpp"
#include "idps/mlp.hpp"

namespace idps {

struct FixedFormat {
  int total_bits = 16;
  int frac_bits = 12;

  /// Throws RangeError unless 0 < frac_bits < total_bits <= 32.
  void validate() const;

  std::int64_t max_raw() const { return (std::int64_t{1} << (total_bits - 1)) - 1; }
  std::int64_t min_raw() const { return -(std::int64_t{1} << (total_bits - 1)); }
  double max_value() const;
  double min_value() const;
  double step() const;

  /// "q4.12" style: integer bits (sign included) and fractional bits.
  static FixedFormat parse(std::string_view text);
  std::string name() const;

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

/// round-half-to-even(x * 2^frac_bits), saturated to the format's range.
std::int32_t to_fixed(double x, FixedFormat f);
double from_fixed(std::int64_t raw, FixedFormat f);

inline constexpr std::size_t kTanhLutSize = 256;
inline constexpr int kTanhLutHalfRange = 4;  // table spans [-4, 4]

/// tanh sampled at kTanhLutSize equally spaced points from -4 to 4 inclusive.
std::vector<std::int32_t> build_tanh_lut(FixedFormat f);

struct QLayer {
  std::size_t rows = 0;  // fan_out
  std::size_t cols = 0;  // fan_in
  std::vector<std::int32_t> weights;  // row-major
  std::vector<std::int32_t> bias;

  friend bool operator==(const QLayer&, const QLayer&) = default;
};

struct QNetwork {
  FixedFormat format;
  std::vector<QLayer> layers;
  std::vector<std::int32_t> tanh_lut;
  std::string source_checksum;

  std::size_t input_size() const { return layers.front().cols; }
  std::size_t output_size() const { return layers.back().rows; }

  friend bool operator==(const QNetwork&, const QNetwork&) = default;
};

/// Throws RangeExceededError naming the first layer with a parameter outside
/// the format's range.
QNetwork quantize_network(const Network& net, FixedFormat f, std::string source_checksum = {});

std::vector<std::int32_t> quantize_input(std::span<const double> x, FixedFormat f);

struct QResult {
  ClassId predicted = 0;
  // Final-layer accumulators, 2 * frac_bits fractional bits.
  std::vector<std::int64_t> outputs;
};

/// Quantizes the scaled input, then runs the integer-only pass.
QResult q_forward(const QNetwork& qnet, std::span<const double> x);
QResult q_forward_fixed(const QNetwork& qnet, std::span<const std::int32_t> xq);

/// Interpolated table tanh of a fixed-point value; clamps beyond +-4.
std::int32_t lut_tanh(std::int32_t x, std::span<const std::int32_t> lut, FixedFormat f);

std::string qnetwork_to_text(const QNetwork& q);
QNetwork qnetwork_from_text(std::string_view text);
void save_qnetwork(const std::filesystem::path& path, const QNetwork& q);
QNetwork load_qnetwork(const std::filesystem::path& path);

struct AgreementReport {
  std::vector<ClassId> float_class;
  std::vector<ClassId> fixed_class;

  std::size_t matches() const;
  double agreement() const;
  /// `index,float_class,fixed_class,match` rows.
  std::string to_csv() const;
};

/// Classifies every row of an already-scaled dataset through both paths.
AgreementReport compare_paths(const Network& net, const QNetwork& qnet, const Dataset& scaled);

}  // namespace idps
