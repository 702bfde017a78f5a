#include "idps/model_io.hpp"

#include <map>
#include <sstream>

#include "idps/error.hpp"
#include "idps/text_io.hpp"

namespace idps {

std::vector<double> TrainedModel::prepare(
    const std::array<std::string, kFeatureCount>& fields) const {
  const auto raw = encode_features(fields, schema);
  return scaler.apply(raw);
}

namespace {

void write_values(std::ostream& os, std::string_view key, std::span<const double> values) {
  os << key;
  for (double v : values) os << ' ' << text::format_double(v);
  os << '\n';
}

void write_block(std::ostream& os, std::string_view key, const std::string& body) {
  std::size_t lines = 0;
  for (char c : body) lines += c == '\n';
  os << key << ' ' << lines << '\n' << body;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : lines_(text::split(text, '\n')) {
    if (!lines_.empty() && lines_.back().empty()) lines_.pop_back();
  }

  std::string_view next() {
    if (pos_ >= lines_.size()) throw FormatError("model file truncated");
    return lines_[pos_++];
  }

  // Next line split on spaces; the first token must equal `key`.
  std::vector<std::string_view> expect(std::string_view key) {
    const auto line = next();
    auto tokens = tokens_of(line);
    if (tokens.empty() || tokens[0] != key)
      throw FormatError("model file line " + std::to_string(pos_) + ": expected '" +
                        std::string(key) + "'");
    return tokens;
  }

  std::size_t line_number() const { return pos_; }

  static std::vector<std::string_view> tokens_of(std::string_view line) {
    std::vector<std::string_view> out;
    for (auto t : text::split(text::trim(line), ' '))
      if (!t.empty()) out.push_back(t);
    return out;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

double to_double(std::string_view s) {
  const auto v = text::parse_double(s);
  if (!v) throw FormatError("model file: not a number '" + std::string(s) + "'");
  return *v;
}

long long to_int(std::string_view s) {
  const auto v = text::parse_int(s);
  if (!v) throw FormatError("model file: not an integer '" + std::string(s) + "'");
  return *v;
}

std::size_t to_size(std::string_view s) {
  const auto v = to_int(s);
  if (v < 0) throw FormatError("model file: negative size '" + std::string(s) + "'");
  return static_cast<std::size_t>(v);
}

std::vector<double> values_after_key(const std::vector<std::string_view>& tokens) {
  std::vector<double> out;
  for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(to_double(tokens[i]));
  return out;
}

std::map<std::string, std::string, std::less<>> key_values(
    const std::vector<std::string_view>& tokens) {
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos)
      throw FormatError("model file: expected key=value, got '" + std::string(tokens[i]) + "'");
    kv.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string, std::less<>>& kv,
                           std::string_view key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("model file: missing '" + std::string(key) + "'");
  return it->second;
}

std::string read_block(LineReader& r, std::string_view key) {
  const auto tokens = r.expect(key);
  if (tokens.size() != 2) throw FormatError("model file: malformed '" + std::string(key) + "' header");
  const auto n = to_size(tokens[1]);
  std::string body;
  for (std::size_t i = 0; i < n; ++i) {
    body += r.next();
    body.push_back('\n');
  }
  return body;
}

}  // namespace

std::string model_to_text(const TrainedModel& m) {
  std::ostringstream os;
  const auto& layout = m.network.layout;
  const auto& tc = m.train_config;
  os << kModelMagic << ' ' << kModelVersion << '\n';
  os << "seed " << tc.seed << '\n';
  os << "train learning_rate=" << text::format_double(tc.learning_rate)
     << " momentum=" << text::format_double(tc.momentum) << " patience=" << tc.patience
     << " goal_mse=" << text::format_double(tc.goal_mse) << " max_epochs=" << tc.max_epochs
     << " batch_size=" << tc.batch_size << '\n';
  os << "split train=" << text::format_double(m.split.train_fraction)
     << " val=" << text::format_double(m.split.val_fraction)
     << " test=" << text::format_double(m.split.test_fraction) << " seed=" << m.split.seed
     << " shuffle=" << (m.split.shuffle ? 1 : 0) << " sample=" << m.sample_size << '\n';
  os << "layout input=" << layout.input_size << " hidden=";
  for (std::size_t i = 0; i < layout.hidden_sizes.size(); ++i)
    os << (i ? "," : "") << layout.hidden_sizes[i];
  os << " output=" << layout.output_size << '\n';
  os << "activation hidden " << activation_name(layout.hidden_activation) << '\n';
  os << "activation output " << activation_name(layout.output_activation) << '\n';
  write_values(os, "scaler_min", m.scaler.min);
  write_values(os, "scaler_max", m.scaler.max);
  write_block(os, "schema", m.schema.to_text());
  write_block(os, "taxonomy", m.taxonomy.to_text());
  for (std::size_t l = 0; l < m.network.layers.size(); ++l) {
    const auto& layer = m.network.layers[l];
    os << "layer " << l << ' ' << layer.weights.rows() << ' ' << layer.weights.cols() << '\n';
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) write_values(os, "w", layer.weights.row(r));
    write_values(os, "b", layer.bias);
  }
  os << "end\n";
  return os.str();
}

TrainedModel model_from_text(std::string_view text) {
  LineReader r(text);
  TrainedModel m;
  {
    const auto magic = r.expect(kModelMagic);
    if (magic.size() != 2 || to_int(magic[1]) != kModelVersion)
      throw FormatError("unsupported model file version");
  }
  m.train_config.seed = static_cast<std::uint64_t>(to_size(r.expect("seed").at(1)));
  {
    const auto kv = key_values(r.expect("train"));
    auto& tc = m.train_config;
    tc.learning_rate = to_double(require(kv, "learning_rate"));
    tc.momentum = to_double(require(kv, "momentum"));
    tc.patience = to_size(require(kv, "patience"));
    tc.goal_mse = to_double(require(kv, "goal_mse"));
    tc.max_epochs = to_size(require(kv, "max_epochs"));
    tc.batch_size = to_size(require(kv, "batch_size"));
  }
  {
    const auto kv = key_values(r.expect("split"));
    m.split.train_fraction = to_double(require(kv, "train"));
    m.split.val_fraction = to_double(require(kv, "val"));
    m.split.test_fraction = to_double(require(kv, "test"));
    m.split.seed = static_cast<std::uint64_t>(to_size(require(kv, "seed")));
    m.split.shuffle = to_int(require(kv, "shuffle")) != 0;
    m.sample_size = to_size(require(kv, "sample"));
  }
  NetworkLayout layout;
  {
    const auto kv = key_values(r.expect("layout"));
    layout.input_size = to_size(require(kv, "input"));
    layout.output_size = to_size(require(kv, "output"));
    layout.hidden_sizes.clear();
    for (auto h : text::split(require(kv, "hidden"), ',')) layout.hidden_sizes.push_back(to_size(h));
  }
  for (const char* which : {"hidden", "output"}) {
    const auto t = r.expect("activation");
    if (t.size() != 3 || t[1] != which) throw FormatError("model file: malformed activation line");
    (std::string_view(which) == "hidden" ? layout.hidden_activation : layout.output_activation) =
        parse_activation(t[2]);
  }
  layout.validate();
  m.scaler.min = values_after_key(r.expect("scaler_min"));
  m.scaler.max = values_after_key(r.expect("scaler_max"));
  if (m.scaler.min.size() != layout.input_size || m.scaler.max.size() != layout.input_size)
    throw FormatError("model file: scaler width does not match the input layer");
  m.schema = FeatureSchema::parse(read_block(r, "schema"));
  m.taxonomy = AttackTaxonomy::parse(read_block(r, "taxonomy"));

  m.network = zero_network(layout);
  for (std::size_t l = 0; l < layout.layer_count(); ++l) {
    const auto header = r.expect("layer");
    if (header.size() != 4 || to_size(header[1]) != l || to_size(header[2]) != layout.fan_out(l) ||
        to_size(header[3]) != layout.fan_in(l))
      throw FormatError("model file: layer " + std::to_string(l) + " header does not match layout");
    auto& layer = m.network.layers[l];
    for (std::size_t row = 0; row < layer.weights.rows(); ++row) {
      const auto values = values_after_key(r.expect("w"));
      if (values.size() != layer.weights.cols())
        throw FormatError("model file: weight row width mismatch in layer " + std::to_string(l));
      std::copy(values.begin(), values.end(), layer.weights.row(row).begin());
    }
    layer.bias = values_after_key(r.expect("b"));
    if (layer.bias.size() != layout.fan_out(l))
      throw FormatError("model file: bias width mismatch in layer " + std::to_string(l));
  }
  r.expect("end");
  if (!m.network.all_finite()) throw FormatError("model file: non-finite parameter");
  return m;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  text::write_file_atomic(path, model_to_text(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  return model_from_text(text::read_file(path));
}

}  // namespace idps
