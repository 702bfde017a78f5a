#include "idps/kdd.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "idps/error.hpp"
#include "idps/text_io.hpp"

namespace idps {

namespace {

constexpr std::size_t kLabelledFields = kFeatureCount + 1;

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_hot_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
};

constexpr std::size_t kProtocolIndex = 1;

bool is_symbolic_index(std::size_t i) { return i >= 1 && i <= 3; }

std::string_view kind_name(FeatureKind k) {
  return k == FeatureKind::symbolic ? "symbolic" : "continuous";
}

void copy_features(const std::vector<std::string_view>& parts,
                   std::array<std::string, kFeatureCount>& out) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = std::string(text::trim(parts[i]));
}

bool is_comment_or_blank(std::string_view line) {
  line = text::trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

std::string_view class_name(ClassId id) {
  switch (id) {
    case 0: return "normal";
    case 1: return "dos";
    case 2: return "probe";
    case 3: return "r2l";
    case 4: return "u2r";
    case 5: return "other";
    default: return "invalid";
  }
}

const std::array<std::string_view, kFeatureCount>& kdd99_feature_names() { return kFeatureNames; }

std::string normalize_label(std::string_view name) {
  name = text::trim(name);
  if (!name.empty() && name.back() == '.') name.remove_suffix(1);
  return text::to_lower(text::trim(name));
}

RawRecord parse_record(std::string_view line) {
  const auto parts = text::split(line, ',');
  if (parts.size() != kLabelledFields) throw FieldCountError(parts.size(), kLabelledFields);
  RawRecord rec;
  copy_features(parts, rec.features);
  rec.label = normalize_label(parts.back());
  if (rec.label.empty()) throw EmptyLabelError();
  return rec;
}

StreamRecord parse_stream_record(std::string_view line) {
  const auto parts = text::split(line, ',');
  if (parts.size() != kFeatureCount && parts.size() != kLabelledFields)
    throw FieldCountError(parts.size(), kLabelledFields);
  StreamRecord rec;
  copy_features(parts, rec.features);
  if (parts.size() == kLabelledFields) {
    auto label = normalize_label(parts.back());
    if (label.empty()) throw EmptyLabelError();
    rec.label = std::move(label);
  }
  return rec;
}

std::string format_record(const RawRecord& record) {
  std::string out;
  for (const auto& f : record.features) {
    out += f;
    out.push_back(',');
  }
  out += record.label;
  out.push_back('.');
  return out;
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema FeatureSchema::kdd99() {
  FeatureSchema s;
  s.descriptors_.reserve(kFeatureCount);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    FeatureDescriptor d;
    d.name = std::string(kFeatureNames[i]);
    d.kind = is_symbolic_index(i) ? FeatureKind::symbolic : FeatureKind::continuous;
    s.descriptors_.push_back(std::move(d));
  }
  s.descriptors_[kProtocolIndex].codes = {{"tcp", 0}, {"udp", 1}, {"icmp", 2}};
  return s;
}

FeatureSchema FeatureSchema::parse(std::string_view text) {
  FeatureSchema s;
  std::size_t line_no = 0;
  for (auto line : text::split(text, '\n')) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    auto parts = text::split(text::trim(line), ',');
    if (parts.size() < 2 || parts.size() > 3)
      throw FormatError("schema line " + std::to_string(line_no) + ": expected name,kind[,codes]");
    FeatureDescriptor d;
    d.name = std::string(text::trim(parts[0]));
    const auto kind = text::trim(parts[1]);
    if (kind == "continuous") {
      d.kind = FeatureKind::continuous;
    } else if (kind == "symbolic") {
      d.kind = FeatureKind::symbolic;
    } else {
      throw FormatError("schema line " + std::to_string(line_no) + ": unknown kind '" +
                        std::string(kind) + "'");
    }
    if (parts.size() == 3) {
      if (d.kind != FeatureKind::symbolic)
        throw FormatError("schema line " + std::to_string(line_no) +
                          ": codes given for a continuous feature");
      std::istringstream codes{std::string(parts[2])};
      std::string pair;
      while (codes >> pair) {
        const auto colon = pair.rfind(':');
        const auto code = colon == std::string::npos
                              ? std::nullopt
                              : text::parse_int(std::string_view(pair).substr(colon + 1));
        if (!code || colon == 0)
          throw FormatError("schema line " + std::to_string(line_no) + ": bad code entry '" +
                            pair + "'");
        if (!d.codes.emplace(pair.substr(0, colon), static_cast<int>(*code)).second)
          throw FormatError("schema line " + std::to_string(line_no) + ": duplicate symbol '" +
                            pair.substr(0, colon) + "'");
      }
    }
    s.descriptors_.push_back(std::move(d));
  }
  s.validate();
  return s;
}

FeatureSchema FeatureSchema::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

std::string FeatureSchema::to_text() const {
  std::string out = "# name,kind[,symbol:code ...]\n";
  for (const auto& d : descriptors_) {
    out += d.name;
    out.push_back(',');
    out += kind_name(d.kind);
    if (d.kind == FeatureKind::symbolic) {
      std::vector<std::pair<int, std::string>> by_code;
      for (const auto& [sym, code] : d.codes) by_code.emplace_back(code, sym);
      std::sort(by_code.begin(), by_code.end());
      out.push_back(',');
      for (std::size_t i = 0; i < by_code.size(); ++i) {
        if (i) out.push_back(' ');
        out += by_code[i].second + ":" + std::to_string(by_code[i].first);
      }
    }
    out.push_back('\n');
  }
  return out;
}

void FeatureSchema::validate() const {
  if (descriptors_.size() != kFeatureCount)
    throw FormatError("schema must describe " + std::to_string(kFeatureCount) +
                      " features, found " + std::to_string(descriptors_.size()));
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& d = descriptors_[i];
    if (d.name != kFeatureNames[i])
      throw FormatError("schema feature " + std::to_string(i + 1) + " is '" + d.name +
                        "', expected '" + std::string(kFeatureNames[i]) + "'");
    const auto want = is_symbolic_index(i) ? FeatureKind::symbolic : FeatureKind::continuous;
    if (d.kind != want)
      throw FormatError("schema feature '" + d.name + "' must be " + std::string(kind_name(want)));
    std::vector<int> seen;
    for (const auto& [sym, code] : d.codes) {
      if (code < 0) throw FormatError("schema feature '" + d.name + "' has a negative code");
      seen.push_back(code);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw FormatError("schema feature '" + d.name + "' reuses a code");
  }
  const auto& proto = descriptors_[kProtocolIndex].codes;
  auto has = [&](const char* sym, int code) {
    auto it = proto.find(sym);
    return it != proto.end() && it->second == code;
  };
  if (!has("tcp", 0) || !has("udp", 1) || !has("icmp", 2))
    throw FormatError("protocol_type codes must be tcp:0 udp:1 icmp:2");
}

std::optional<int> FeatureSchema::code_of(std::size_t feature, std::string_view symbol) const {
  const auto& codes = descriptors_.at(feature).codes;
  auto it = codes.find(std::string(symbol));
  if (it == codes.end()) return std::nullopt;
  return it->second;
}

int FeatureSchema::assign_code(std::size_t feature, std::string_view symbol) {
  auto& codes = descriptors_.at(feature).codes;
  auto it = codes.find(std::string(symbol));
  if (it != codes.end()) return it->second;
  int next = 0;
  for (const auto& [sym, code] : codes) next = std::max(next, code + 1);
  codes.emplace(std::string(symbol), next);
  return next;
}

// ---------------------------------------------------------------------------
// AttackTaxonomy

AttackTaxonomy AttackTaxonomy::kdd99() {
  AttackTaxonomy t;
  t.set("normal", 0);
  for (auto n : {"back", "land", "neptune", "pod", "smurf", "teardrop", "apache2", "mailbomb",
                 "processtable", "udpstorm"})
    t.set(n, 1);
  for (auto n : {"ipsweep", "nmap", "portsweep", "satan", "mscan", "saint"}) t.set(n, 2);
  for (auto n : {"ftp_write", "guess_passwd", "imap", "multihop", "phf", "spy", "warezclient",
                 "warezmaster", "sendmail", "snmpgetattack", "snmpguess", "worm", "xsnoop"})
    t.set(n, 3);
  for (auto n : {"buffer_overflow", "loadmodule", "perl", "rootkit", "httptunnel", "ps",
                 "sqlattack", "xterm"})
    t.set(n, 4);
  for (auto n : {"named", "xlock"}) t.set(n, 5);
  return t;
}

AttackTaxonomy AttackTaxonomy::parse(std::string_view text) {
  AttackTaxonomy t;
  std::size_t line_no = 0;
  for (auto line : text::split(text, '\n')) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto parts = text::split(text::trim(line), ',');
    const auto id = parts.size() == 2 ? text::parse_int(parts[1]) : std::nullopt;
    if (!id || *id < 0 || *id >= kClassCount)
      throw FormatError("taxonomy line " + std::to_string(line_no) +
                        ": expected attack_name,class_id with class_id in 0..5");
    const auto name = normalize_label(parts[0]);
    if (name.empty()) throw FormatError("taxonomy line " + std::to_string(line_no) + ": empty name");
    t.set(name, static_cast<ClassId>(*id));
  }
  return t;
}

AttackTaxonomy AttackTaxonomy::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

std::string AttackTaxonomy::to_text() const {
  std::string out = "# attack_name,class_id (0 normal, 1 dos, 2 probe, 3 r2l, 4 u2r, 5 other)\n";
  for (const auto& [name, id] : class_of_) out += name + "," + std::to_string(id) + "\n";
  return out;
}

ClassId AttackTaxonomy::class_of(std::string_view name) const {
  auto it = class_of_.find(name);
  return it == class_of_.end() ? static_cast<ClassId>(AttackClass::other) : it->second;
}

bool AttackTaxonomy::contains(std::string_view name) const { return class_of_.contains(name); }

void AttackTaxonomy::set(std::string_view name, ClassId id) {
  if (id < 0 || id >= kClassCount) throw RangeError("class id out of range: " + std::to_string(id));
  class_of_.insert_or_assign(normalize_label(name), id);
}

ClassId map_attack(std::string_view name, const AttackTaxonomy& taxonomy) {
  return taxonomy.class_of(normalize_label(name));
}

// ---------------------------------------------------------------------------
// encoding

FeatureVector encode_features(const std::array<std::string, kFeatureCount>& fields,
                              const FeatureSchema& schema) {
  FeatureVector v{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& d = schema[i];
    if (d.kind == FeatureKind::symbolic) {
      const auto code = schema.code_of(i, fields[i]);
      if (!code) throw UnknownSymbolError(d.name, fields[i]);
      v[i] = static_cast<double>(*code);
    } else {
      const auto x = text::parse_double(fields[i]);
      if (!x) throw NumericParseError(d.name, fields[i]);
      v[i] = *x;
    }
  }
  return v;
}

EncodedRecord encode_record(const RawRecord& raw, const FeatureSchema& schema,
                            const AttackTaxonomy& taxonomy) {
  return {encode_features(raw.features, schema), map_attack(raw.label, taxonomy)};
}

EncodedRecord encode_record(const RawRecord& raw, FeatureSchema& schema,
                            const AttackTaxonomy& taxonomy, EncodeMode mode) {
  if (mode == EncodeMode::permissive) {
    // Validate numerics first so a bad record never extends the schema.
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (schema[i].kind == FeatureKind::continuous && !text::parse_double(raw.features[i]))
        throw NumericParseError(schema[i].name, raw.features[i]);
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (schema[i].kind == FeatureKind::symbolic) schema.assign_code(i, raw.features[i]);
    }
  }
  return encode_record(raw, std::as_const(schema), taxonomy);
}

Dataset load_dataset(std::istream& in, FeatureSchema& schema, const AttackTaxonomy& taxonomy,
                     LoadOptions options, const std::string& source_name) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto rec = encode_record(parse_record(line), schema, taxonomy, options.mode);
      d.push_back(rec.features, rec.label);
    } catch (const Error& e) {
      throw DatasetLineError(line_no, e.what());
    }
  }
  if (d.empty()) throw EmptyDatasetError(source_name);
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, FeatureSchema& schema,
                     const AttackTaxonomy& taxonomy, LoadOptions options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path.string());
  return load_dataset(in, schema, taxonomy, options, path.string());
}

}  // namespace idps
