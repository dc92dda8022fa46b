#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "kacdp/data.hpp"
#include "kacdp/error.hpp"
#include "oracles.hpp"
#include "synth.hpp"
#include "tmpdir.hpp"

using namespace kacdp;
using testutil::TempDir;

namespace {

const std::filesystem::path kSmall = std::filesystem::path(KACDP_TEST_DATA_DIR) / "gmsc_small.csv";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string c; std::getline(in, c, ',');) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::io_error;
}

}  // namespace

TEST_CASE("load_gmsc_csv reads the fixture") {
  const auto recs = load_gmsc_csv(kSmall);
  REQUIRE(recs.size() == 10);
  CHECK(recs[0].serious_dlqin_2yrs == 1);
  CHECK(recs[0].revolving_utilization == 0.766126609);
  CHECK(recs[0].age == 45);
  CHECK(recs[0].past_due_30_59 == 2);
  CHECK(recs[0].debt_ratio == 0.802982129);
  CHECK(recs[0].monthly_income == 9120.0);
  CHECK(recs[0].open_credit_lines == 13);
  CHECK(recs[0].past_due_90 == 0);
  CHECK(recs[0].real_estate_loans == 6);
  CHECK(recs[0].past_due_60_89 == 0);
  CHECK(recs[0].dependents == 2);
  CHECK(recs[2].past_due_90 == 1);
  CHECK_FALSE(recs[6].monthly_income.has_value());
  CHECK(recs[6].dependents == 0);
  CHECK_FALSE(recs[8].monthly_income.has_value());
  CHECK_FALSE(recs[8].dependents.has_value());
}

TEST_CASE("column order follows the header names") {
  const auto base = load_gmsc_csv(kSmall);
  const auto lines = lines_of(testutil::slurp(kSmall));
  std::vector<std::size_t> perm(cells_of(lines[0]).size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  TempDir dir("data");
  for (int t = 0; t < 5; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    // the unnamed index column is only tolerated in front, so drop it
    std::string text;
    for (std::size_t l = 0; l < 4; ++l) {
      const auto cells = cells_of(lines[l]);
      std::vector<std::string> out;
      for (std::size_t i : perm) {
        if (i != 0) out.push_back(cells[i]);
      }
      text += join(out) + "\n";
    }
    testutil::spit(dir / "perm.csv", text);
    const auto recs = load_gmsc_csv(dir / "perm.csv");
    REQUIRE(recs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(recs[i] == base[i]);
  }
}

TEST_CASE("loader accepts files without an index column and with CRLF") {
  TempDir dir("data");
  const auto lines = lines_of(testutil::slurp(kSmall));
  std::string text;
  for (const auto& l : lines) {
    auto cells = cells_of(l);
    cells.erase(cells.begin());
    text += join(cells) + "\r\n";
  }
  testutil::spit(dir / "plain.csv", "\xEF\xBB\xBF" + text + "\r\n");
  CHECK(load_gmsc_csv(dir / "plain.csv") == load_gmsc_csv(kSmall));

  auto named = lines;
  named[0].replace(0, 2, "Unnamed: 0");
  std::string t2;
  for (const auto& l : named) t2 += l + "\n";
  testutil::spit(dir / "unnamed.csv", t2);
  CHECK(load_gmsc_csv(dir / "unnamed.csv").size() == 10);
}

TEST_CASE("loader errors") {
  TempDir dir("data");
  CHECK(kind_of([&] { load_gmsc_csv(dir / "missing.csv"); }) == ErrorKind::io_error);

  const std::string head = synth::header();
  testutil::spit(dir / "empty.csv", "");
  CHECK(kind_of([&] { load_gmsc_csv(dir / "empty.csv"); }) == ErrorKind::header_mismatch);

  std::string no_age = head;
  no_age.replace(no_age.find(",age,"), 5, ",Age,");
  testutil::spit(dir / "h.csv", no_age + "\n");
  CHECK(kind_of([&] { load_gmsc_csv(dir / "h.csv"); }) == ErrorKind::header_mismatch);

  testutil::spit(dir / "extra.csv", head + ",Extra\n");
  CHECK(kind_of([&] { load_gmsc_csv(dir / "extra.csv"); }) == ErrorKind::header_mismatch);

  const std::string good = "1,0,0.5,40,0,0.3,5000,4,0,1,0,2";
  auto expect_row_error = [&](const std::string& bad, const std::string& tag) {
    testutil::spit(dir / "bad.csv", head + "\n" + good + "\n" + bad + "\n");
    try {
      load_gmsc_csv(dir / "bad.csv");
      FAIL("no error for " << tag);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse_error);
      CHECK_MESSAGE(std::string(e.what()).find("row 3") != std::string::npos, tag);
    }
  };
  expect_row_error("2,0,abc,40,0,0.3,5000,4,0,1,0,2", "text");
  expect_row_error("2,2,0.5,40,0,0.3,5000,4,0,1,0,2", "label");
  expect_row_error("2,0,0.5,40.5,0,0.3,5000,4,0,1,0,2", "fractional age");
  expect_row_error("2,0,0.5,40,-1,0.3,5000,4,0,1,0,2", "negative");
  expect_row_error("2,0,0.5,40,0,0.3,5000,4,0,1,0", "short row");
  expect_row_error("2,0,0.5,,0,0.3,5000,4,0,1,0,2", "missing age");
}

TEST_CASE("preprocess: imputation and totality") {
  const auto recs = load_gmsc_csv(kSmall);
  const Dataset d = preprocess(recs);
  CHECK(d.size() == 10);
  CHECK(d.feature_names == std::vector<std::string>{"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"});
  std::vector<double> incomes;
  for (const auto& r : recs) {
    if (r.monthly_income) incomes.push_back(*r.monthly_income);
  }
  CHECK(d.scaler.income_fill == oracle::sorted_percentile(incomes, 0.5));
  CHECK(d.scaler.dependents_fill == 0.0);
  CHECK(std::isnan(d.raw(6, kIncomeColumn)));
  CHECK(d.features(6, kIncomeColumn) == d.scaler.columns[kIncomeColumn].apply(d.scaler.income_fill));
  CHECK(d.features(8, kDependentsColumn) == d.scaler.columns[kDependentsColumn].apply(0.0));
  for (double v : d.features.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  CHECK(kind_of([] { preprocess(std::vector<RawRecord>{}); }) == ErrorKind::empty_input);
}

TEST_CASE("preprocess: constant column and affine endpoints") {
  std::vector<RawRecord> recs(40);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].age = i < 10 ? 21 : i >= 30 ? 99 : 30 + static_cast<int>(i);
    recs[i].debt_ratio = 0.25;
    recs[i].monthly_income = 1000.0;
    recs[i].serious_dlqin_2yrs = i % 2;
  }
  const Dataset d = preprocess(recs);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(d.features(i, 3) == 0.0);
    if (recs[i].age == 21) CHECK(d.features(i, 1) == -1.0);
    if (recs[i].age == 99) CHECK(d.features(i, 1) == 1.0);
  }
  CHECK(d.scaler.columns[1].min == 21.0);
  CHECK(d.scaler.columns[1].max == 99.0);
  // midpoint maps to zero
  CHECK(d.scaler.columns[1].apply(60.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("winsorization bounds match a sort-based percentile") {
  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> heavy(0.0, 2.0);
  Matrix raw(1000, kFeatureCount);
  Labels y(1000);
  for (std::size_t i = 0; i < raw.rows; ++i) {
    for (std::size_t j = 0; j < raw.cols; ++j) raw(i, j) = heavy(rng) * static_cast<double>(j + 1);
    y[i] = i % 7 == 0;
  }
  const Dataset d = preprocess(raw, y);
  for (std::size_t j = 0; j < raw.cols; ++j) {
    std::vector<double> col(raw.rows);
    for (std::size_t i = 0; i < raw.rows; ++i) col[i] = raw(i, j);
    const double lo = oracle::sorted_percentile(col, 0.01);
    const double hi = oracle::sorted_percentile(col, 0.99);
    CHECK(d.scaler.columns[j].clip_low == lo);
    CHECK(d.scaler.columns[j].clip_high == hi);
    CHECK(d.scaler.columns[j].min == lo);
    CHECK(d.scaler.columns[j].max == hi);
    for (std::size_t i = 0; i < raw.rows; ++i) {
      if (raw(i, j) >= hi) CHECK(d.features(i, j) == 1.0);
      if (raw(i, j) <= lo) CHECK(d.features(i, j) == -1.0);
    }
  }
  CHECK(percentile({3.0, std::nan(""), 1.0, 2.0}, 0.5) == 2.0);
  CHECK(percentile({1.0, 2.0}, 0.25) == 1.25);
}

TEST_CASE("stratified split") {
  Labels y(100, 0);
  for (std::size_t i = 0; i < 10; ++i) y[i * 10 + 3] = 1;
  const SplitIndices s = stratified_split(y, 0.2, 42);
  REQUIRE(s.test.size() == 20);
  std::size_t pos = 0;
  for (auto i : s.test) pos += y[i];
  CHECK(pos == 2);
  CHECK(s.test.size() - pos == 18);
  CHECK(s.train.size() == 80);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 100);

  const SplitIndices again = stratified_split(y, 0.2, 42);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(stratified_split(y, 0.2, 43).test != s.test);

  CHECK(kind_of([&] { stratified_split(y, 0.0, 1); }) == ErrorKind::invalid_fraction);
  CHECK(kind_of([&] { stratified_split(y, 1.0, 1); }) == ErrorKind::invalid_fraction);
  Labels lonely(10, 0);
  lonely[4] = 1;
  CHECK(kind_of([&] { stratified_split(lonely, 0.2, 1); }) == ErrorKind::class_too_small);
}

TEST_CASE("split refits on train only") {
  TempDir dir("data");
  synth::write_gmsc(dir / "g.csv", 600, 5);
  const Dataset full = preprocess(load_gmsc_csv(dir / "g.csv"));
  const auto [train, test] = split(full, 0.2, 42);
  CHECK(train.size() + test.size() == full.size());
  CHECK(test.size() == static_cast<std::size_t>(std::llround(0.2 * std::count(full.labels.begin(), full.labels.end(), 0))) +
                           static_cast<std::size_t>(std::llround(0.2 * std::count(full.labels.begin(), full.labels.end(), 1))));
  CHECK(test.scaler == train.scaler);

  // training-only fit: refitting on the train raw rows gives the same scaler
  CHECK(fit_scaler(train.raw, train.policy) == train.scaler);

  // held-out rows follow the manual affine map of the train scaler
  for (std::size_t i = 0; i < test.size(); i += 17) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double v = test.raw(i, j);
      if (std::isnan(v)) v = j == kIncomeColumn ? train.scaler.income_fill : 0.0;
      const ColumnScaler& c = train.scaler.columns[j];
      const double clipped = std::min(std::max(v, c.clip_low), c.clip_high);
      const double manual = std::min(1.0, std::max(-1.0, 2.0 * (clipped - c.min) / (c.max - c.min) - 1.0));
      CHECK(test.features(i, j) == manual);
    }
  }
  for (double v : test.features.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }

  const auto [train2, test2] = split(full, 0.2, 42);
  CHECK(dataset_fingerprint(train2) == dataset_fingerprint(train));
  CHECK(dataset_fingerprint(test2) == dataset_fingerprint(test));
  CHECK(dataset_fingerprint(train) != dataset_fingerprint(test));
}

TEST_CASE("dataset and scaler dumps") {
  TempDir dir("data");
  const Dataset d = preprocess(load_gmsc_csv(kSmall));
  write_dataset_csv(d, dir / "d.csv");
  write_scaler(d.scaler, dir / "s.txt");
  const auto lines = lines_of(testutil::slurp(dir / "d.csv"));
  CHECK(lines.size() == 11);
  CHECK(lines[0] == "x0,x1,x2,x3,x4,x5,x6,x7,x8,x9,label");
  const auto scaler = lines_of(testutil::slurp(dir / "s.txt"));
  CHECK(scaler.size() == 2 + 4 * kFeatureCount);
  CHECK(scaler[0].starts_with("income_fill="));
  CHECK(kind_of([&] { write_scaler(d.scaler, dir / "no" / "such" / "s.txt"); }) == ErrorKind::io_error);
}
