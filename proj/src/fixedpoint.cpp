#include "idps/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "idps/error.hpp"
#include "idps/fixedpoint_kernel.hpp"
#include "idps/kernels.hpp"
#include "idps/text_io.hpp"

namespace idps {

void FixedFormat::validate() const {
  if (!(frac_bits > 0 && frac_bits < total_bits && total_bits <= 32))
    throw RangeError("fixed format needs 0 < frac_bits < total_bits <= 32, got " + name());
}

double FixedFormat::max_value() const { return std::ldexp(static_cast<double>(max_raw()), -frac_bits); }
double FixedFormat::min_value() const { return std::ldexp(static_cast<double>(min_raw()), -frac_bits); }
double FixedFormat::step() const { return std::ldexp(1.0, -frac_bits); }

FixedFormat FixedFormat::parse(std::string_view text) {
  const auto t = text::to_lower(text::trim(text));
  const auto dot = t.find('.');
  if (t.size() < 4 || t[0] != 'q' || dot == std::string::npos)
    throw FormatError("fixed format must look like q4.12, got '" + std::string(text) + "'");
  const auto int_bits = text::parse_int(std::string_view(t).substr(1, dot - 1));
  const auto frac_bits = text::parse_int(std::string_view(t).substr(dot + 1));
  if (!int_bits || !frac_bits || *int_bits < 1 || *frac_bits < 1 || *int_bits + *frac_bits > 32)
    throw FormatError("fixed format must look like q4.12, got '" + std::string(text) + "'");
  FixedFormat f{static_cast<int>(*int_bits + *frac_bits), static_cast<int>(*frac_bits)};
  f.validate();
  return f;
}

std::string FixedFormat::name() const {
  return "q" + std::to_string(total_bits - frac_bits) + "." + std::to_string(frac_bits);
}

std::int32_t to_fixed(double x, FixedFormat f) {
  if (std::isnan(x)) return 0;
  // nearbyint honours the default round-to-nearest-even mode
  const double r = std::nearbyint(std::ldexp(x, f.frac_bits));
  const double lo = static_cast<double>(f.min_raw());
  const double hi = static_cast<double>(f.max_raw());
  return static_cast<std::int32_t>(std::clamp(r, lo, hi));
}

double from_fixed(std::int64_t raw, FixedFormat f) {
  return std::ldexp(static_cast<double>(raw), -f.frac_bits);
}

std::vector<std::int32_t> build_tanh_lut(FixedFormat f) {
  f.validate();
  std::vector<std::int32_t> lut(kTanhLutSize);
  const double span = 2.0 * kTanhLutHalfRange;
  for (std::size_t i = 0; i < kTanhLutSize; ++i) {
    const double x = -kTanhLutHalfRange + span * static_cast<double>(i) /
                                              static_cast<double>(kTanhLutSize - 1);
    lut[i] = to_fixed(std::tanh(x), f);
  }
  return lut;
}

std::int32_t lut_tanh(std::int32_t x, std::span<const std::int32_t> lut, FixedFormat f) {
  return static_cast<std::int32_t>(
      fixed_kernel::lut_tanh<std::int64_t>(x, lut, f.frac_bits, kTanhLutHalfRange));
}

QNetwork quantize_network(const Network& net, FixedFormat f, std::string source_checksum) {
  f.validate();
  QNetwork q;
  q.format = f;
  q.source_checksum = std::move(source_checksum);
  q.tanh_lut = build_tanh_lut(f);
  const double hi = f.max_value();
  const double lo = f.min_value();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    double max_abs = 0.0;
    bool out_of_range = false;
    auto check = [&](double v) {
      max_abs = std::max(max_abs, std::abs(v));
      if (!(v >= lo && v <= hi)) out_of_range = true;
    };
    for (double v : layer.weights.values()) check(v);
    for (double v : layer.bias) check(v);
    if (out_of_range) throw RangeExceededError(l, max_abs, hi);

    QLayer ql;
    ql.rows = layer.weights.rows();
    ql.cols = layer.weights.cols();
    ql.weights.reserve(layer.weights.size());
    for (double v : layer.weights.values()) ql.weights.push_back(to_fixed(v, f));
    for (double v : layer.bias) ql.bias.push_back(to_fixed(v, f));
    q.layers.push_back(std::move(ql));
  }
  return q;
}

std::vector<std::int32_t> quantize_input(std::span<const double> x, FixedFormat f) {
  std::vector<std::int32_t> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(to_fixed(v, f));
  return out;
}

QResult q_forward_fixed(const QNetwork& qnet, std::span<const std::int32_t> xq) {
  if (xq.size() != qnet.input_size())
    throw DimensionError("quantized network expects " + std::to_string(qnet.input_size()) +
                         " inputs, got " + std::to_string(xq.size()));
  std::vector<fixed_kernel::LayerView> views;
  views.reserve(qnet.layers.size());
  for (const auto& l : qnet.layers) views.push_back({l.rows, l.cols, l.weights, l.bias});
  QResult r;
  r.outputs = fixed_kernel::forward<std::int64_t>(views, xq, qnet.tanh_lut, qnet.format.frac_bits,
                                                  qnet.format.min_raw(), qnet.format.max_raw(),
                                                  kTanhLutHalfRange);
  r.predicted = static_cast<ClassId>(
      std::max_element(r.outputs.begin(), r.outputs.end()) - r.outputs.begin());
  return r;
}

QResult q_forward(const QNetwork& qnet, std::span<const double> x) {
  return q_forward_fixed(qnet, quantize_input(x, qnet.format));
}

// ---------------------------------------------------------------------------
// text format

namespace {

constexpr std::string_view kQMagic = "idps-qmodel";

void write_ints(std::ostream& os, std::string_view key, std::span<const std::int32_t> values) {
  os << key;
  for (auto v : values) os << ' ' << v;
  os << '\n';
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto t : text::split(text::trim(line), ' '))
    if (!t.empty()) out.push_back(t);
  return out;
}

std::int64_t int_token(std::string_view s) {
  const auto v = text::parse_int(s);
  if (!v) throw FormatError("quantized model: not an integer '" + std::string(s) + "'");
  return *v;
}

std::vector<std::int32_t> ints_after_key(const std::vector<std::string_view>& t) {
  std::vector<std::int32_t> out;
  for (std::size_t i = 1; i < t.size(); ++i) out.push_back(static_cast<std::int32_t>(int_token(t[i])));
  return out;
}

}  // namespace

std::string qnetwork_to_text(const QNetwork& q) {
  std::ostringstream os;
  os << kQMagic << " 1\n";
  os << "format " << q.format.name() << " total_bits=" << q.format.total_bits
     << " frac_bits=" << q.format.frac_bits << '\n';
  os << "source_sha256 " << (q.source_checksum.empty() ? "-" : q.source_checksum) << '\n';
  os << "layers " << q.layers.size() << '\n';
  os << "lut_range -" << kTanhLutHalfRange << ' ' << kTanhLutHalfRange << '\n';
  write_ints(os, "lut", q.tanh_lut);
  for (std::size_t l = 0; l < q.layers.size(); ++l) {
    const auto& layer = q.layers[l];
    os << "layer " << l << ' ' << layer.rows << ' ' << layer.cols << '\n';
    for (std::size_t r = 0; r < layer.rows; ++r)
      write_ints(os, "w", std::span(layer.weights).subspan(r * layer.cols, layer.cols));
    write_ints(os, "b", layer.bias);
  }
  os << "end\n";
  return os.str();
}

QNetwork qnetwork_from_text(std::string_view text) {
  auto lines = text::split(text, '\n');
  std::size_t pos = 0;
  auto expect = [&](std::string_view key) {
    while (pos < lines.size() && text::trim(lines[pos]).empty()) ++pos;
    if (pos >= lines.size()) throw FormatError("quantized model truncated");
    auto t = tokens(lines[pos++]);
    if (t.empty() || t[0] != key)
      throw FormatError("quantized model line " + std::to_string(pos) + ": expected '" +
                        std::string(key) + "'");
    return t;
  };
  QNetwork q;
  if (const auto t = expect(kQMagic); t.size() != 2 || t[1] != "1")
    throw FormatError("unsupported quantized model version");
  {
    const auto t = expect("format");
    if (t.size() < 2) throw FormatError("quantized model: malformed format line");
    q.format = FixedFormat::parse(t[1]);
  }
  {
    const auto t = expect("source_sha256");
    q.source_checksum = t.size() > 1 && t[1] != "-" ? std::string(t[1]) : std::string();
  }
  const auto layer_count = static_cast<std::size_t>(int_token(expect("layers").at(1)));
  expect("lut_range");
  q.tanh_lut = ints_after_key(expect("lut"));
  if (q.tanh_lut.size() != kTanhLutSize) throw FormatError("quantized model: LUT must have 256 entries");
  for (std::size_t l = 0; l < layer_count; ++l) {
    const auto h = expect("layer");
    if (h.size() != 4 || int_token(h[1]) != static_cast<std::int64_t>(l))
      throw FormatError("quantized model: malformed layer header");
    QLayer ql;
    ql.rows = static_cast<std::size_t>(int_token(h[2]));
    ql.cols = static_cast<std::size_t>(int_token(h[3]));
    for (std::size_t r = 0; r < ql.rows; ++r) {
      const auto row = ints_after_key(expect("w"));
      if (row.size() != ql.cols) throw FormatError("quantized model: weight row width mismatch");
      ql.weights.insert(ql.weights.end(), row.begin(), row.end());
    }
    ql.bias = ints_after_key(expect("b"));
    if (ql.bias.size() != ql.rows) throw FormatError("quantized model: bias width mismatch");
    if (l > 0 && q.layers.back().rows != ql.cols)
      throw FormatError("quantized model: layer sizes do not chain");
    q.layers.push_back(std::move(ql));
  }
  expect("end");
  if (q.layers.empty()) throw FormatError("quantized model has no layers");
  return q;
}

void save_qnetwork(const std::filesystem::path& path, const QNetwork& q) {
  text::write_file_atomic(path, qnetwork_to_text(q));
}

QNetwork load_qnetwork(const std::filesystem::path& path) {
  return qnetwork_from_text(text::read_file(path));
}

// ---------------------------------------------------------------------------

std::size_t AgreementReport::matches() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < float_class.size(); ++i) n += float_class[i] == fixed_class[i];
  return n;
}

double AgreementReport::agreement() const {
  return float_class.empty() ? 0.0
                             : static_cast<double>(matches()) / static_cast<double>(float_class.size());
}

std::string AgreementReport::to_csv() const {
  std::ostringstream os;
  os << "index,float_class,fixed_class,match\n";
  for (std::size_t i = 0; i < float_class.size(); ++i)
    os << i << ',' << float_class[i] << ',' << fixed_class[i] << ','
       << (float_class[i] == fixed_class[i] ? 1 : 0) << '\n';
  return os.str();
}

AgreementReport compare_paths(const Network& net, const QNetwork& qnet, const Dataset& scaled) {
  AgreementReport rep;
  const Matrix outputs = kernels::parallel::batch_forward(net, scaled.features);
  rep.float_class.resize(scaled.size());
  rep.fixed_class.resize(scaled.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(scaled.size()); ++r) {
    const auto ri = static_cast<std::size_t>(r);
    rep.float_class[ri] = argmax(outputs.row(ri));
    rep.fixed_class[ri] = q_forward(qnet, scaled.row(ri)).predicted;
  }
  return rep;
}

}  // namespace idps
