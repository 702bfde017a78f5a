#pragma once

// Integer kernels behind q_forward, written against a generic integer type
// so tests can instantiate them with a wrapper that rejects floating-point
// operands. Production code uses std::int64_t.

#include <cstdint>
#include <span>
#include <vector>

namespace idps::fixed_kernel {

template <class Int>
Int from_raw(std::int64_t v) {
  return Int(v);
}

// Wrapper types supply their own raw_value, found by argument-dependent lookup.
inline std::int64_t raw_value(std::int64_t v) { return v; }

template <class Int>
Int sat_add(Int a, Int b) {
  const Int max = from_raw<Int>(INT64_MAX);
  const Int min = from_raw<Int>(INT64_MIN);
  const Int zero = from_raw<Int>(0);
  if (b > zero && a > max - b) return max;
  if (b < zero && a < min - b) return min;
  return a + b;
}

template <class Int>
Int clamp_to(Int v, std::int64_t lo, std::int64_t hi) {
  if (v < from_raw<Int>(lo)) return from_raw<Int>(lo);
  if (v > from_raw<Int>(hi)) return from_raw<Int>(hi);
  return v;
}

/// v / 2^shift rounded half to even; shift >= 1.
template <class Int>
Int shift_round_even(Int v, int shift) {
  const Int one = from_raw<Int>(1);
  const Int q = v >> shift;  // floor
  const Int rem = v - (q << shift);
  const Int half = one << (shift - 1);
  if (rem > half || (rem == half && (q & one) != from_raw<Int>(0))) return q + one;
  return q;
}

/// num / den rounded half to even; den > 0.
template <class Int>
Int div_round_even(Int num, Int den) {
  const Int zero = from_raw<Int>(0);
  const Int one = from_raw<Int>(1);
  Int q = num / den;
  Int rem = num - q * den;
  if (rem < zero) {  // make q the floor
    q = q - one;
    rem = rem + den;
  }
  const Int twice = rem + rem;
  if (twice > den || (twice == den && (q & one) != zero)) return q + one;
  return q;
}

/// Table tanh with linear interpolation. `lut` holds `size` samples on
/// [-half_range, half_range]; x carries `frac` fractional bits.
template <class Int>
Int lut_tanh(Int x, std::span<const std::int32_t> lut, int frac, int half_range) {
  const Int span_raw = from_raw<Int>(2 * half_range) << frac;
  const Int offset = x + (from_raw<Int>(half_range) << frac);
  if (offset <= from_raw<Int>(0)) return from_raw<Int>(lut.front());
  if (offset >= span_raw) return from_raw<Int>(lut.back());
  const Int steps = from_raw<Int>(static_cast<std::int64_t>(lut.size() - 1));
  const Int pos = offset * steps;
  const Int idx = pos / span_raw;
  const Int rem = pos - idx * span_raw;
  const auto i = static_cast<std::size_t>(raw_value(idx));
  const Int lo = from_raw<Int>(lut[i]);
  const Int hi = from_raw<Int>(lut[i + 1]);
  return lo + div_round_even((hi - lo) * rem, span_raw);
}

struct LayerView {
  std::size_t rows;
  std::size_t cols;
  std::span<const std::int32_t> weights;
  std::span<const std::int32_t> bias;
};

/// Full integer forward pass. Hidden layers: bias and products accumulate
/// with 2*frac fractional bits, are rescaled to `frac` bits, saturated to
/// [min_raw, max_raw] and passed through the table tanh. The last layer's
/// accumulators are returned unscaled.
template <class Int>
std::vector<Int> forward(std::span<const LayerView> layers, std::span<const std::int32_t> input,
                         std::span<const std::int32_t> lut, int frac, std::int64_t min_raw,
                         std::int64_t max_raw, int half_range) {
  std::vector<Int> act;
  act.reserve(input.size());
  for (auto v : input) act.push_back(from_raw<Int>(v));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const bool last = l + 1 == layers.size();
    std::vector<Int> next;
    next.reserve(layer.rows);
    for (std::size_t j = 0; j < layer.rows; ++j) {
      Int acc = from_raw<Int>(layer.bias[j]) << frac;
      const auto w = layer.weights.subspan(j * layer.cols, layer.cols);
      for (std::size_t i = 0; i < layer.cols; ++i) acc = sat_add(acc, from_raw<Int>(w[i]) * act[i]);
      if (last) {
        next.push_back(acc);
      } else {
        const Int v = clamp_to(shift_round_even(acc, frac), min_raw, max_raw);
        next.push_back(lut_tanh(v, lut, frac, half_range));
      }
    }
    act = std::move(next);
  }
  return act;
}

}  // namespace idps::fixed_kernel
