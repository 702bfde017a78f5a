#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "idps/dataset.hpp"
#include "idps/eval.hpp"
#include "idps/fixedpoint.hpp"
#include "idps/kdd.hpp"
#include "idps/mlp.hpp"
#include "idps/text_io.hpp"
#include "test_util.hpp"

using namespace idps;

// Hand-rolled generators: each property draws its cases from a seeded Rng
// and reports the failing seed through INFO.

namespace gen {

constexpr int kCases = 300;

SplitSpec split_spec(Rng& r) {
  SplitSpec s;
  s.val_fraction = 0.01 + 0.3 * r.uniform01();
  s.test_fraction = 0.01 + 0.3 * r.uniform01();
  s.train_fraction = 1.0 - s.val_fraction - s.test_fraction;
  s.seed = r.next();
  s.shuffle = r.below(4) != 0;
  return s;
}

Dataset labelled_rows(Rng& r, std::size_t n, std::size_t dim) {
  Dataset d;
  d.features = Matrix(0, dim);
  std::vector<double> row(dim);
  // skewed class mix, like the real traffic
  const double weights[] = {0.2, 0.7, 0.05, 0.03, 0.005, 0.015};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) row[j] = static_cast<double>(i * dim + j);
    double u = r.uniform01();
    ClassId c = 0;
    while (c < kClassCount - 1 && u >= weights[c]) u -= weights[c++];
    d.push_back(row, c);
  }
  return d;
}

std::string token(Rng& r, std::size_t max_len) {
  static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz_0123456789";
  std::string s(1 + r.below(max_len), 'a');
  for (auto& ch : s) ch = alphabet[r.below(sizeof(alphabet) - 1)];
  return s;
}

RawRecord record(Rng& r) {
  static const auto schema = FeatureSchema::kdd99();
  RawRecord rec;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& desc = schema[i];
    if (desc.kind == FeatureKind::symbolic) {
      rec.features[i] = token(r, 8);
    } else if (r.below(2) == 0) {
      rec.features[i] = std::to_string(r.below(100000));
    } else {
      rec.features[i] = text::format_double(r.uniform01());
    }
  }
  rec.label = token(r, 12);
  return rec;
}

std::vector<double> scores(Rng& r, std::size_t n, bool coarse) {
  std::vector<double> s(n);
  for (auto& v : s) v = coarse ? static_cast<double>(r.below(5)) : r.uniform01();
  return s;
}

}  // namespace gen

TEST_CASE("split partitions are disjoint, exhaustive and sized by the rounding rule") {
  Rng r(1001);
  for (int c = 0; c < gen::kCases; ++c) {
    const auto spec = gen::split_spec(r);
    const std::size_t n = 3 + r.below(2000);
    INFO("case " << c << " n " << n);
    const auto sizes = split_sizes(n, spec);
    const auto expect_val = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * spec.val_fraction + 0.5 + 1e-9));
    CHECK(sizes.val == expect_val);
    CHECK(sizes.train + sizes.val + sizes.test == n);

    const auto d = gen::labelled_rows(r, n, 1);
    const auto s = split_dataset(d, spec);
    std::vector<std::size_t> all;
    for (const auto* rows : {&s.train_rows, &s.val_rows, &s.test_rows})
      all.insert(all.end(), rows->begin(), rows->end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    for (std::size_t i = 0; i < s.test_rows.size(); ++i)
      CHECK(s.test.row(i)[0] == d.row(s.test_rows[i])[0]);
  }
}

TEST_CASE("stratified samples respect per-class quotas") {
  Rng r(1002);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 50 + r.below(3000);
    const auto d = gen::labelled_rows(r, n, 1);
    const std::size_t m = 1 + r.below(n);
    INFO("case " << c << " n " << n << " m " << m);
    const auto s = stratified_sample(d, m, r.next());
    REQUIRE(s.size() == m);
    const auto full = d.class_counts();
    const auto got = s.class_counts();
    for (int k = 0; k < kClassCount; ++k) {
      const double exact = static_cast<double>(full[k]) * static_cast<double>(m) /
                           static_cast<double>(n);
      CHECK(static_cast<double>(got[k]) >= std::floor(exact));
      CHECK(static_cast<double>(got[k]) <= std::floor(exact) + 1.0);
    }
    // source order is kept
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.row(i)[0] > s.row(i - 1)[0]);
  }
}

TEST_CASE("scaler maps training data into [0,1] and preserves order") {
  Rng r(1003);
  for (int c = 0; c < 50; ++c) {
    const auto d = testing::random_dataset(2 + r.below(200), 5, 3, r.next());
    Dataset wide = d;
    for (auto& v : wide.features.values()) v = v * 1000.0 - 300.0;
    const auto sc = fit_scaler(wide);
    const auto scaled = sc.apply(wide);
    for (double v : scaled.features.values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t i = 1; i < wide.size(); ++i) {
        const double a = wide.row(i - 1)[j];
        const double b = wide.row(i)[j];
        const double sa = scaled.row(i - 1)[j];
        const double sb = scaled.row(i)[j];
        if (a < b) CHECK(sa <= sb);
        if (a > b) CHECK(sa >= sb);
      }
  }
}

TEST_CASE("record formatting and parsing are inverse") {
  Rng r(1004);
  for (int c = 0; c < gen::kCases; ++c) {
    const auto rec = gen::record(r);
    INFO("case " << c);
    CHECK(parse_record(format_record(rec)) == rec);
  }
}

TEST_CASE("confusion totals and rates are consistent") {
  Rng r(1005);
  for (int c = 0; c < gen::kCases; ++c) {
    const std::size_t n = 1 + r.below(500);
    std::vector<ClassId> a(n), p(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<ClassId>(r.below(kClassCount));
      p[i] = r.below(3) == 0 ? a[i] : static_cast<ClassId>(r.below(kClassCount));
      hits += a[i] == p[i];
    }
    const auto cm = confusion(p, a);
    CHECK(cm.total() == n);
    CHECK(cm.trace() == hits);
    const auto rates = accuracy(cm);
    CHECK(rates.success + rates.failure == doctest::Approx(1.0).epsilon(1e-15));
    const auto t = alarm_tally(p, a);
    CHECK(t.total() == n);
    // split at an arbitrary point, sum of parts equals the whole
    const std::size_t cut = r.below(n + 1);
    const std::vector<ClassId> p1(p.begin(), p.begin() + cut), a1(a.begin(), a.begin() + cut);
    const std::vector<ClassId> p2(p.begin() + cut, p.end()), a2(a.begin() + cut, a.end());
    CHECK(confusion(p1, a1) + confusion(p2, a2) == cm);
  }
}

TEST_CASE("auc is invariant to monotone rescoring and flips under negation") {
  Rng r(1006);
  for (int c = 0; c < gen::kCases; ++c) {
    const std::size_t n = 2 + r.below(120);
    auto s = gen::scores(r, n, c % 3 == 0);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = r.below(2) == 1;
    pos[0] = true;
    pos[1] = false;
    const double auc = roc(s, pos).auc;
    auto cubed = s;
    for (auto& v : cubed) v = std::exp(3.0 * v) - 2.0;
    CHECK(std::abs(roc(cubed, pos).auc - auc) <= 1e-12);
    auto neg = s;
    for (auto& v : neg) v = -v;
    CHECK(std::abs(roc(neg, pos).auc - (1.0 - auc)) <= 1e-12);
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
  }
}

TEST_CASE("network outputs are distributions and predictions are their argmax") {
  Rng r(1007);
  for (int c = 0; c < 200; ++c) {
    NetworkLayout l;
    l.input_size = 1 + r.below(50);
    l.hidden_sizes = {1 + static_cast<std::size_t>(r.below(30))};
    l.output_size = 2 + r.below(6);
    const auto net = init_network(l, r.next());
    std::vector<double> x(l.input_size);
    for (auto& v : x) v = r.symmetric(5.0);
    const auto y = forward(net, x);
    CHECK(std::accumulate(y.begin(), y.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(predict_class(net, x) == argmax(y));
  }
}

TEST_CASE("fixed-point conversion and table tanh are monotone") {
  const FixedFormat f{16, 12};
  Rng r(1008);
  for (int c = 0; c < 20000; ++c) {
    const double a = r.symmetric(10.0);
    const double b = a + r.uniform01() * 0.01;
    CHECK(to_fixed(a, f) <= to_fixed(b, f));
  }
  const auto lut = build_tanh_lut(f);
  std::int32_t prev = lut_tanh(static_cast<std::int32_t>(f.min_raw()), lut, f);
  for (std::int64_t x = f.min_raw() + 1; x <= f.max_raw(); ++x) {
    const auto v = lut_tanh(static_cast<std::int32_t>(x), lut, f);
    REQUIRE(v >= prev);
    prev = v;
  }
}

TEST_CASE("quantized forward tracks the float network") {
  Rng r(1009);
  const FixedFormat f{16, 12};
  std::size_t agree = 0;
  std::size_t total = 0;
  for (int c = 0; c < 20; ++c) {
    const auto net = init_network(NetworkLayout{}, r.next());
    const auto q = quantize_network(net, f);
    for (int s = 0; s < 100; ++s) {
      std::vector<double> x(kFeatureCount);
      for (auto& v : x) v = r.uniform01();
      agree += predict_class(net, x) == q_forward(q, x).predicted;
      ++total;
    }
  }
  CHECK(static_cast<double>(agree) / static_cast<double>(total) >= 0.95);
}
