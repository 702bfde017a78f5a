#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "idps/dataset.hpp"
#include "idps/error.hpp"
#include "test_util.hpp"

using namespace idps;

namespace {

Dataset indexed(std::size_t n) {
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(i);
    d.push_back(std::vector<double>{v, 2.0 * v}, static_cast<ClassId>(i % kClassCount));
  }
  return d;
}

std::vector<double> first_column(const Dataset& d) {
  std::vector<double> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(d.row(i)[0]);
  return out;
}

}  // namespace

TEST_CASE("split sizes") {
  SUBCASE("the 311030-record case") {
    const auto s = split_sizes(311030, SplitSpec{});
    CHECK(s.train == 217720);
    CHECK(s.val == 46655);
    CHECK(s.test == 46655);
  }
  SUBCASE("ten records at 80/10/10") {
    const auto s = split_sizes(10, SplitSpec{0.8, 0.1, 0.1});
    CHECK(s.train == 8);
    CHECK(s.val == 1);
    CHECK(s.test == 1);
  }
  SUBCASE("halves round up") {
    // 5 * 0.1 = 0.5 -> 1
    const auto s = split_sizes(5, SplitSpec{0.8, 0.1, 0.1});
    CHECK(s.val == 1);
    CHECK(s.test == 1);
    CHECK(s.train == 3);
  }
  SUBCASE("degenerate") {
    CHECK_THROWS_AS(split_sizes(3, SplitSpec{0.9, 0.05, 0.05}), DegenerateSplitError);
    CHECK_THROWS_AS(split_dataset(indexed(2), SplitSpec{}), DegenerateSplitError);
  }
  SUBCASE("invalid fractions") {
    CHECK_THROWS_AS(split_sizes(100, SplitSpec{0.7, 0.2, 0.2}), RangeError);
    CHECK_THROWS_AS(split_sizes(100, SplitSpec{1.0, 0.0, 0.0}), RangeError);
  }
}

TEST_CASE("split partitions are disjoint, exhaustive and reproducible") {
  const auto d = indexed(1000);
  SplitSpec spec;
  spec.seed = 42;
  const auto a = split_dataset(d, spec);
  const auto b = split_dataset(d, spec);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  CHECK(a.train.size() == 700);
  CHECK(a.val.size() == 150);
  CHECK(a.test.size() == 150);

  std::set<std::size_t> seen;
  for (const auto* rows : {&a.train_rows, &a.val_rows, &a.test_rows})
    for (auto r : *rows) CHECK(seen.insert(r).second);
  CHECK(seen.size() == 1000);
  for (std::size_t i = 0; i < a.train.size(); ++i)
    CHECK(a.train.row(i)[0] == static_cast<double>(a.train_rows[i]));

  spec.seed = 43;
  const auto c = split_dataset(d, spec);
  CHECK_FALSE(c.train == a.train);
}

TEST_CASE("split without shuffle keeps file order") {
  SplitSpec spec;
  spec.shuffle = false;
  const auto s = split_dataset(indexed(20), spec);
  const auto tr = first_column(s.train);
  CHECK(tr.front() == 0.0);
  CHECK(tr.back() == 13.0);
  CHECK(first_column(s.val) == std::vector<double>{14, 15, 16});
  CHECK(first_column(s.test) == std::vector<double>{17, 18, 19});
}

TEST_CASE("stratified sample keeps class proportions") {
  Dataset d;
  for (int i = 0; i < 1000; ++i) d.push_back(std::vector<double>{double(i)}, i < 700 ? 1 : (i < 950 ? 0 : 2));
  const auto s = stratified_sample(d, 100, 9);
  REQUIRE(s.size() == 100);
  const auto counts = s.class_counts(3);
  CHECK(counts[0] == 25);
  CHECK(counts[1] == 70);
  CHECK(counts[2] == 5);
  const auto col = first_column(s);
  CHECK(std::is_sorted(col.begin(), col.end()));
  CHECK(stratified_sample(d, 100, 9) == s);
  CHECK_THROWS_AS(stratified_sample(d, 1001, 9), RangeError);
}

TEST_CASE("split report") {
  const auto s = split_dataset(indexed(60), SplitSpec{});
  const auto csv = split_report_csv(s);
  CHECK(csv.rfind("partition,size,normal,dos,probe,r2l,u2r,other\n", 0) == 0);
  CHECK(csv.find("\ntrain,42,") != std::string::npos);
  CHECK(csv.find("\nvalidation,9,") != std::string::npos);
  CHECK(csv.find("\ntest,9,") != std::string::npos);
  CHECK(split_report_text(s).find("validation") != std::string::npos);
}

TEST_CASE("fit_scaler") {
  SUBCASE("single record") {
    Dataset d;
    d.push_back(std::vector<double>{3.0, -1.0}, 0);
    const auto s = fit_scaler(d);
    CHECK(s.min == std::vector<double>{3.0, -1.0});
    CHECK(s.max == std::vector<double>{3.0, -1.0});
  }
  SUBCASE("two records 0 and 4") {
    Dataset d;
    d.push_back(std::vector<double>{0.0, 7.0}, 0);
    d.push_back(std::vector<double>{4.0, 7.0}, 1);
    const auto s = fit_scaler(d);
    CHECK(s.min[0] == 0.0);
    CHECK(s.max[0] == 4.0);
    CHECK(s.min[1] == s.max[1]);
  }
  SUBCASE("empty") { CHECK_THROWS_AS(fit_scaler(Dataset{}), DegenerateSplitError); }
}

TEST_CASE("apply scaler") {
  Scaler s{{0.0, 10.0, 5.0}, {4.0, 20.0, 5.0}};
  CHECK(s.apply(std::vector<double>{0.0, 10.0, 5.0}) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(s.apply(std::vector<double>{2.0, 15.0, 99.0}) == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(s.apply(std::vector<double>{8.0, -3.0, 5.0}) == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(s.apply(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("scale then unscale recovers non-constant features") {
  const auto d = testing::random_dataset(200, 6, 3, 5);
  auto shifted = d;
  for (auto& v : shifted.features.values()) v = v * 1000.0 - 250.0;
  const auto s = fit_scaler(shifted);
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    const auto x = shifted.row(i);
    const auto y = s.unapply(s.apply(x));
    for (std::size_t j = 0; j < x.size(); ++j)
      CHECK(std::abs(y[j] - x[j]) <= 1e-12 * std::max(1.0, std::abs(x[j])));
  }
}

TEST_CASE("one_hot") {
  CHECK(one_hot(0, 6) == std::vector<double>{1, 0, 0, 0, 0, 0});
  CHECK(one_hot(5, 6) == std::vector<double>{0, 0, 0, 0, 0, 1});
  CHECK_THROWS_AS(one_hot(6, 6), RangeError);
  CHECK_THROWS_AS(one_hot(-1, 6), RangeError);
}

TEST_CASE("encoded dataset csv round-trip") {
  const auto dir = testing::scratch_dir("csv");
  auto d = testing::random_dataset(50, 41, kClassCount, 11);
  d.features(3, 4) = 1e-300;
  d.features(7, 0) = -123456.789;
  write_dataset_csv(dir / "d.csv", d);
  CHECK(read_dataset_csv(dir / "d.csv") == d);
  CHECK_FALSE(std::filesystem::exists(dir / "d.csv.tmp"));
  {
    std::ofstream(dir / "bad.csv") << "1,2,0\n1,2\n";
    CHECK_THROWS_AS(read_dataset_csv(dir / "bad.csv"), DatasetLineError);
    std::ofstream(dir / "empty.csv") << "";
    CHECK_THROWS_AS(read_dataset_csv(dir / "empty.csv"), EmptyDatasetError);
  }
}
