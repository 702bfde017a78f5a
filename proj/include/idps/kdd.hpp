#pragma once

// KDD99 record ingestion: line parsing, symbolic feature coding, and the
// attack-name to class-id taxonomy.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idps/data.hpp"

namespace idps {

enum class AttackClass : ClassId { normal = 0, dos = 1, probe = 2, r2l = 3, u2r = 4, other = 5 };

std::string_view class_name(ClassId id);

using FeatureVector = std::array<double, kFeatureCount>;

struct RawRecord {
  std::array<std::string, kFeatureCount> features;
  std::string label;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

// A detection-stream line: labels are optional there.
struct StreamRecord {
  std::array<std::string, kFeatureCount> features;
  std::optional<std::string> label;
};

/// Parses one 42-field record. Fields are trimmed, the label is lowercased
/// and loses any trailing '.'.
RawRecord parse_record(std::string_view line);

/// Accepts 41 (unlabelled) or 42 (labelled) fields.
StreamRecord parse_stream_record(std::string_view line);

/// Inverse of parse_record on normalized input: fields joined by ',' and the
/// label terminated by '.', as in the public KDD99 files.
std::string format_record(const RawRecord& record);

enum class FeatureKind { continuous, symbolic };

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::map<std::string, int> codes;  // symbolic only

  friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

// Ordered description of the 41 KDD99 features plus the integer codes
// assigned to symbolic values. Codes for service and flag are assigned in
// first-appearance order and persisted with the schema.
class FeatureSchema {
 public:
  /// The 41 KDD99 features with protocol_type pre-coded tcp=0, udp=1,
  /// icmp=2 and empty service/flag maps.
  static FeatureSchema kdd99();

  /// Parses the `name,kind[,sym:code sym:code ...]` text format.
  static FeatureSchema parse(std::string_view text);
  static FeatureSchema load(const std::filesystem::path& path);
  std::string to_text() const;

  const std::vector<FeatureDescriptor>& descriptors() const noexcept { return descriptors_; }
  const FeatureDescriptor& operator[](std::size_t i) const { return descriptors_.at(i); }

  std::optional<int> code_of(std::size_t feature, std::string_view symbol) const;

  /// Returns the existing code or assigns the next free one.
  int assign_code(std::size_t feature, std::string_view symbol);

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  void validate() const;

  std::vector<FeatureDescriptor> descriptors_;
};

/// Canonical feature names in file order.
const std::array<std::string_view, kFeatureCount>& kdd99_feature_names();

class AttackTaxonomy {
 public:
  /// Attack table for KDD99: the four attack families plus "other" for the
  /// names the table leaves unclassified.
  static AttackTaxonomy kdd99();

  /// Parses `attack_name,class_id` lines; '#' starts a comment.
  static AttackTaxonomy parse(std::string_view text);
  static AttackTaxonomy load(const std::filesystem::path& path);
  std::string to_text() const;

  /// Class of a label; unknown names are `other`.
  ClassId class_of(std::string_view name) const;
  bool contains(std::string_view name) const;
  void set(std::string_view name, ClassId id);

  const std::map<std::string, ClassId, std::less<>>& entries() const noexcept { return class_of_; }

  friend bool operator==(const AttackTaxonomy&, const AttackTaxonomy&) = default;

 private:
  std::map<std::string, ClassId, std::less<>> class_of_;
};

/// Lowercases and strips a trailing '.'.
std::string normalize_label(std::string_view name);

ClassId map_attack(std::string_view name, const AttackTaxonomy& taxonomy);

enum class EncodeMode { strict, permissive };

struct EncodedRecord {
  FeatureVector features{};
  ClassId label = 0;
};

/// Strict encoding against a fixed schema.
EncodedRecord encode_record(const RawRecord& raw, const FeatureSchema& schema,
                            const AttackTaxonomy& taxonomy);

/// In permissive mode unseen symbols are appended to the schema.
EncodedRecord encode_record(const RawRecord& raw, FeatureSchema& schema,
                            const AttackTaxonomy& taxonomy, EncodeMode mode);

FeatureVector encode_features(const std::array<std::string, kFeatureCount>& fields,
                              const FeatureSchema& schema);

struct LoadOptions {
  EncodeMode mode = EncodeMode::permissive;
};

/// Loads and encodes a whole KDD99 file in file order. Blank lines are
/// skipped; errors carry the 1-based line number.
Dataset load_dataset(const std::filesystem::path& path, FeatureSchema& schema,
                     const AttackTaxonomy& taxonomy, LoadOptions options = {});

Dataset load_dataset(std::istream& in, FeatureSchema& schema, const AttackTaxonomy& taxonomy,
                     LoadOptions options = {}, const std::string& source_name = "<stream>");

}  // namespace idps
