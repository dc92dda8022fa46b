#include "kacdp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "kacdp/error.hpp"

namespace kacdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA" || cell == "NaN"; }

[[noreturn]] void fail_row(std::size_t line, std::string_view column, std::string_view cell, std::string_view why) {
  throw Error(ErrorKind::parse_error,
              fmt::format("row {}: column {}: {} (value '{}')", line, column, why, cell));
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    fail_row(line, column, cell, "not a number");
  }
  if (v < 0.0) fail_row(line, column, cell, "negative value");
  return v;
}

int parse_count(std::string_view cell, std::size_t line, std::string_view column) {
  const double v = parse_number(cell, line, column);
  if (v != std::floor(v) || v > static_cast<double>(std::numeric_limits<int>::max())) {
    fail_row(line, column, cell, "not an integer");
  }
  return static_cast<int>(v);
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

double ColumnScaler::apply(double raw) const noexcept {
  const double clipped = std::clamp(raw, clip_low, clip_high);
  if (!(max > min)) return 0.0;
  return std::clamp(2.0 * (clipped - min) / (max - min) - 1.0, -1.0, 1.0);
}

std::vector<RawRecord> load_gmsc_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::header_mismatch, "file is empty: " + path.string());
  if (line.size() >= 3 && std::memcmp(line.data(), "\xEF\xBB\xBF", 3) == 0) line.erase(0, 3);

  // column position of each GMSC field, looked up by name
  const std::vector<std::string_view> header = split_cells(line);
  std::array<std::size_t, kGmscColumns.size()> pos{};
  for (std::size_t c = 0; c < kGmscColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kGmscColumns[c]);
    if (it == header.end()) {
      throw Error(ErrorKind::header_mismatch, fmt::format("missing column {}", kGmscColumns[c]));
    }
    pos[c] = static_cast<std::size_t>(it - header.begin());
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    const bool known = std::find(pos.begin(), pos.end(), i) != pos.end();
    const bool index_column = i == 0 && (header[i].empty() || header[i].starts_with("Unnamed"));
    if (!known && !index_column) {
      throw Error(ErrorKind::header_mismatch, fmt::format("unexpected column '{}'", header[i]));
    }
  }

  std::vector<RawRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::parse_error, fmt::format("row {}: expected {} cells, found {}", line_no,
                                                      header.size(), cells.size()));
    }
    auto cell = [&](std::size_t c) { return cells[pos[c]]; };
    RawRecord r;
    const int label = parse_count(cell(0), line_no, kGmscColumns[0]);
    if (label != 0 && label != 1) fail_row(line_no, kGmscColumns[0], cell(0), "label must be 0 or 1");
    r.serious_dlqin_2yrs = label;
    r.revolving_utilization = parse_number(cell(1), line_no, kGmscColumns[1]);
    r.age = parse_count(cell(2), line_no, kGmscColumns[2]);
    r.past_due_30_59 = parse_count(cell(3), line_no, kGmscColumns[3]);
    r.debt_ratio = parse_number(cell(4), line_no, kGmscColumns[4]);
    if (!is_missing(cell(5))) r.monthly_income = parse_number(cell(5), line_no, kGmscColumns[5]);
    r.open_credit_lines = parse_count(cell(6), line_no, kGmscColumns[6]);
    r.past_due_90 = parse_count(cell(7), line_no, kGmscColumns[7]);
    r.real_estate_loans = parse_count(cell(8), line_no, kGmscColumns[8]);
    r.past_due_60_89 = parse_count(cell(9), line_no, kGmscColumns[9]);
    if (!is_missing(cell(10))) r.dependents = parse_count(cell(10), line_no, kGmscColumns[10]);
    records.push_back(r);
  }
  return records;
}

Matrix raw_features(const std::vector<RawRecord>& records) {
  Matrix m(records.size(), kFeatureCount);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawRecord& r = records[i];
    auto row = m.row(i);
    row[0] = r.revolving_utilization;
    row[1] = r.age;
    row[2] = r.past_due_30_59;
    row[3] = r.debt_ratio;
    row[4] = r.monthly_income.value_or(kNaN);
    row[5] = r.open_credit_lines;
    row[6] = r.past_due_90;
    row[7] = r.real_estate_loans;
    row[8] = r.past_due_60_89;
    row[9] = r.dependents.has_value() ? static_cast<double>(*r.dependents) : kNaN;
  }
  return m;
}

double percentile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = position - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Scaler fit_scaler(const Matrix& raw, const PreprocessPolicy& policy) {
  if (raw.rows == 0) throw Error(ErrorKind::empty_input, "cannot fit a scaler on zero rows");
  Scaler s;
  std::vector<double> column(raw.rows);
  auto load_column = [&](std::size_t j) {
    for (std::size_t i = 0; i < raw.rows; ++i) column[i] = raw(i, j);
  };
  if (raw.cols > kIncomeColumn) {
    load_column(kIncomeColumn);
    s.income_fill = percentile(column, 0.5);
  }
  s.dependents_fill = 0.0;

  s.columns.resize(raw.cols);
  for (std::size_t j = 0; j < raw.cols; ++j) {
    load_column(j);
    const double fill = j == kIncomeColumn ? s.income_fill : j == kDependentsColumn ? s.dependents_fill : 0.0;
    for (double& v : column) {
      if (std::isnan(v)) v = fill;
    }
    ColumnScaler& c = s.columns[j];
    c.clip_low = percentile(column, policy.lower_percentile);
    c.clip_high = percentile(column, policy.upper_percentile);
    c.min = std::numeric_limits<double>::infinity();
    c.max = -std::numeric_limits<double>::infinity();
    for (double v : column) {
      const double w = std::clamp(v, c.clip_low, c.clip_high);
      c.min = std::min(c.min, w);
      c.max = std::max(c.max, w);
    }
  }
  return s;
}

Matrix transform(const Scaler& s, const Matrix& raw) {
  if (raw.cols != s.columns.size()) throw Error(ErrorKind::dimension_mismatch, "scaler column count differs");
  Matrix out(raw.rows, raw.cols);
  for (std::size_t i = 0; i < raw.rows; ++i) {
    for (std::size_t j = 0; j < raw.cols; ++j) {
      double v = raw(i, j);
      if (std::isnan(v)) v = j == kIncomeColumn ? s.income_fill : j == kDependentsColumn ? s.dependents_fill : 0.0;
      out(i, j) = s.columns[j].apply(v);
    }
  }
  return out;
}

Dataset preprocess(Matrix raw, Labels labels, const PreprocessPolicy& policy) {
  if (raw.rows == 0) throw Error(ErrorKind::empty_input, "no records to preprocess");
  if (labels.size() != raw.rows) throw Error(ErrorKind::dimension_mismatch, "label count differs from row count");
  Dataset d;
  d.policy = policy;
  d.scaler = fit_scaler(raw, policy);
  d.features = transform(d.scaler, raw);
  d.labels = std::move(labels);
  d.raw = std::move(raw);
  for (std::size_t j = 0; j < d.features.cols; ++j) d.feature_names.push_back(fmt::format("x{}", j));
  return d;
}

Dataset preprocess(const std::vector<RawRecord>& records, const PreprocessPolicy& policy) {
  if (records.empty()) throw Error(ErrorKind::empty_input, "no records to preprocess");
  Labels labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) labels[i] = static_cast<std::uint8_t>(records[i].serious_dlqin_2yrs);
  return preprocess(raw_features(records), std::move(labels), policy);
}

SplitIndices stratified_split(const Labels& labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_fraction, "test fraction must lie strictly between 0 and 1");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] != 0 ? 1 : 0].push_back(i);

  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    if (members.size() < 2) {
      throw Error(ErrorKind::class_too_small, fmt::format("class {} has {} member(s), need 2", c, members.size()));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  const SplitIndices idx = stratified_split(data.labels, test_fraction, seed);
  auto labels_of = [&](const std::vector<std::size_t>& rows) {
    Labels out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = data.labels[rows[i]];
    return out;
  };
  Dataset train = preprocess(take_rows(data.raw, idx.train), labels_of(idx.train), data.policy);
  Dataset test;
  test.policy = data.policy;
  test.scaler = train.scaler;
  test.raw = take_rows(data.raw, idx.test);
  test.features = transform(train.scaler, test.raw);
  test.labels = labels_of(idx.test);
  test.feature_names = train.feature_names;
  return {std::move(train), std::move(test)};
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  for (const auto& name : data.feature_names) out << name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) out << fmt::format("{},", v);
    out << static_cast<int>(data.labels[i]) << '\n';
  }
}

void write_scaler(const Scaler& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << fmt::format("income_fill={}\ndependents_fill={}\n", s.income_fill, s.dependents_fill);
  for (std::size_t j = 0; j < s.columns.size(); ++j) {
    const ColumnScaler& c = s.columns[j];
    out << fmt::format("x{0}.clip_low={1}\nx{0}.clip_high={2}\nx{0}.min={3}\nx{0}.max={4}\n", j, c.clip_low,
                       c.clip_high, c.min, c.max);
  }
}

std::string dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, data.features.values.data(), data.features.values.size() * sizeof(double));
  h = fnv1a(h, data.labels.data(), data.labels.size());
  return fmt::format("{:016x}", h);
}

}  // namespace kacdp
