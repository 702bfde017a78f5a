#include "idps/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "idps/error.hpp"
#include "idps/kdd.hpp"
#include "idps/random.hpp"
#include "idps/text_io.hpp"

namespace idps {

std::vector<std::size_t> Dataset::class_counts(int k) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (auto y : labels) {
    if (y >= 0 && y < k) ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = Matrix(0, dim());
  out.features.reserve_rows(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) out.push_back(row(i), labels[i]);
  return out;
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0) || !(val_fraction > 0.0) || !(test_fraction > 0.0))
    throw RangeError("split fractions must be positive");
  if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
    throw RangeError("split fractions must sum to 1");
}

namespace {

// The 1e-9 guard keeps exact decimal halves (e.g. 311030 * 0.15) on the
// upper side when the binary product lands a hair below .5.
std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9)); }

}  // namespace

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  SplitSizes s;
  s.val = round_half_up(static_cast<double>(n) * spec.val_fraction);
  s.test = round_half_up(static_cast<double>(n) * spec.test_fraction);
  if (s.val + s.test >= n || s.val == 0 || s.test == 0)
    throw DegenerateSplitError("split of " + std::to_string(n) +
                               " records leaves an empty partition");
  s.train = n - s.val - s.test;
  return s;
}

Split split_dataset(const Dataset& d, const SplitSpec& spec) {
  if (d.size() < 3)
    throw DegenerateSplitError("need at least 3 records to split, have " +
                               std::to_string(d.size()));
  const auto sizes = split_sizes(d.size(), spec);
  std::vector<std::size_t> order;
  if (spec.shuffle) {
    order = Rng(spec.seed).permutation(d.size());
  } else {
    order.resize(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  }
  Split s;
  auto first = order.begin();
  s.train_rows.assign(first, first + static_cast<std::ptrdiff_t>(sizes.train));
  first += static_cast<std::ptrdiff_t>(sizes.train);
  s.val_rows.assign(first, first + static_cast<std::ptrdiff_t>(sizes.val));
  first += static_cast<std::ptrdiff_t>(sizes.val);
  s.test_rows.assign(first, order.end());
  s.train = d.subset(s.train_rows);
  s.val = d.subset(s.val_rows);
  s.test = d.subset(s.test_rows);
  return s;
}

Dataset stratified_sample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n > d.size())
    throw RangeError("cannot sample " + std::to_string(n) + " rows from " +
                     std::to_string(d.size()));
  int k = 0;
  for (auto y : d.labels) k = std::max(k, y + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < d.size(); ++i) members[static_cast<std::size_t>(d.labels[i])].push_back(i);

  // largest remainder: floor quotas, then hand out the leftover rows to the
  // classes with the biggest fractional parts (lowest class id on ties)
  std::vector<std::size_t> quota(members.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const double exact = static_cast<double>(n) * static_cast<double>(members[c].size()) /
                         static_cast<double>(d.size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i) {
    const auto c = remainders[i % remainders.size()].second;
    if (quota[c] < members[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto perm = rng.permutation(members[c].size());
    for (std::size_t j = 0; j < quota[c]; ++j) chosen.push_back(members[c][perm[j]]);
  }
  std::sort(chosen.begin(), chosen.end());
  return d.subset(chosen);
}

std::string split_report_text(const Split& s, int k) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "partition" << std::right << std::setw(10) << "size";
  for (int c = 0; c < k; ++c) os << std::setw(10) << class_name(c);
  os << '\n';
  auto row = [&](const char* name, const Dataset& d) {
    os << std::left << std::setw(12) << name << std::right << std::setw(10) << d.size();
    for (auto n : d.class_counts(k)) os << std::setw(10) << n;
    os << '\n';
  };
  row("train", s.train);
  row("validation", s.val);
  row("test", s.test);
  return os.str();
}

std::string split_report_csv(const Split& s, int k) {
  std::ostringstream os;
  os << "partition,size";
  for (int c = 0; c < k; ++c) os << ',' << class_name(c);
  os << '\n';
  auto row = [&](const char* name, const Dataset& d) {
    os << name << ',' << d.size();
    for (auto n : d.class_counts(k)) os << ',' << n;
    os << '\n';
  };
  row("train", s.train);
  row("validation", s.val);
  row("test", s.test);
  return os.str();
}

// ---------------------------------------------------------------------------

void Scaler::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim())
    throw DimensionError("scaler expects " + std::to_string(dim()) + " features, got " +
                         std::to_string(in.size()));
  for (std::size_t i = 0; i < dim(); ++i) {
    const double range = max[i] - min[i];
    out[i] = range > 0.0 ? std::clamp((in[i] - min[i]) / range, 0.0, 1.0) : 0.0;
  }
}

std::vector<double> Scaler::apply(std::span<const double> in) const {
  std::vector<double> out(in.size());
  apply(in, out);
  return out;
}

Dataset Scaler::apply(const Dataset& d) const {
  Dataset out = d;
  for (std::size_t r = 0; r < d.size(); ++r) apply(d.row(r), out.features.row(r));
  return out;
}

std::vector<double> Scaler::unapply(std::span<const double> scaled) const {
  std::vector<double> out(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = min[i] + scaled[i] * (max[i] - min[i]);
  return out;
}

Scaler fit_scaler(const Dataset& train) {
  if (train.empty()) throw DegenerateSplitError("cannot fit a scaler on an empty partition");
  Scaler s;
  const auto first = train.row(0);
  s.min.assign(first.begin(), first.end());
  s.max.assign(first.begin(), first.end());
  for (std::size_t r = 1; r < train.size(); ++r) {
    const auto x = train.row(r);
    for (std::size_t i = 0; i < x.size(); ++i) {
      s.min[i] = std::min(s.min[i], x[i]);
      s.max[i] = std::max(s.max[i], x[i]);
    }
  }
  return s;
}

std::vector<double> one_hot(ClassId label, int k) {
  if (label < 0 || label >= k)
    throw RangeError("label " + std::to_string(label) + " outside 0.." + std::to_string(k - 1));
  std::vector<double> t(static_cast<std::size_t>(k), 0.0);
  t[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
  text::write_file_atomic(path, [&](std::ostream& os) {
    for (std::size_t r = 0; r < d.size(); ++r) {
      for (double v : d.row(r)) os << text::format_double(v) << ',';
      os << d.labels[r] << '\n';
    }
  });
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open encoded dataset: " + path.string());
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto parts = text::split(line, ',');
    if (parts.size() < 2 || (!d.empty() && parts.size() != d.dim() + 1))
      throw DatasetLineError(line_no, "inconsistent column count");
    row.clear();
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      const auto v = text::parse_double(parts[i]);
      if (!v) throw DatasetLineError(line_no, "not a number: '" + std::string(parts[i]) + "'");
      row.push_back(*v);
    }
    const auto y = text::parse_int(parts.back());
    if (!y || *y < 0 || *y >= kClassCount) throw DatasetLineError(line_no, "bad class id");
    d.push_back(row, static_cast<ClassId>(*y));
  }
  if (d.empty()) throw EmptyDatasetError(path.string());
  return d;
}

}  // namespace idps
