#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kacdp/dataset.hpp"

namespace kacdp {

/// One row of the GMSC file.
struct RawRecord {
  int serious_dlqin_2yrs = 0;
  double revolving_utilization = 0.0;
  int age = 0;
  int past_due_30_59 = 0;
  int past_due_60_89 = 0;
  int past_due_90 = 0;
  double debt_ratio = 0.0;
  std::optional<double> monthly_income;
  int open_credit_lines = 0;
  int real_estate_loans = 0;
  std::optional<int> dependents;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// GMSC column names. Index 0 is the label; 1..10 are the features x0..x9 in
/// model input order.
inline constexpr std::array<std::string_view, 11> kGmscColumns = {
    "SeriousDlqin2yrs",
    "RevolvingUtilizationOfUnsecuredLines",
    "age",
    "NumberOfTime30-59DaysPastDueNotWorse",
    "DebtRatio",
    "MonthlyIncome",
    "NumberOfOpenCreditLinesAndLoans",
    "NumberOfTimes90DaysLate",
    "NumberRealEstateLoansOrLines",
    "NumberOfTime60-89DaysPastDueNotWorse",
    "NumberOfDependents",
};

/// Human-readable meaning of x0..x9.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureLegend = {
    "credit card utilization rate",
    "age",
    "times 30-59 days past due",
    "debt to monthly income ratio",
    "monthly income",
    "open credit lines and loans",
    "times 90 days late",
    "real estate loans or lines",
    "times 60-89 days past due",
    "number of dependents",
};

inline constexpr std::size_t kIncomeColumn = 4;
inline constexpr std::size_t kDependentsColumn = 9;

/// Parses a GMSC CSV by header name. A leading unnamed index column is
/// ignored; empty or "NA" cells are missing for MonthlyIncome and
/// NumberOfDependents.
std::vector<RawRecord> load_gmsc_csv(const std::filesystem::path& path);

/// Features x0..x9 of each record, NaN where missing.
Matrix raw_features(const std::vector<RawRecord>& records);

/// Fits imputation, winsorization bounds and [-1, 1] scaling on `raw`.
Scaler fit_scaler(const Matrix& raw, const PreprocessPolicy& policy);
Matrix transform(const Scaler& scaler, const Matrix& raw);

/// Linear-interpolated percentile of the non-NaN values, q in [0, 1].
double percentile(std::vector<double> values, double q);

Dataset preprocess(const std::vector<RawRecord>& records, const PreprocessPolicy& policy = {});
/// Builds a dataset directly from raw features and labels.
Dataset preprocess(Matrix raw, Labels labels, const PreprocessPolicy& policy = {});

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified partition; each class contributes round(fraction * size) rows
/// to the test side. Both index lists are ascending.
SplitIndices stratified_split(const Labels& labels, double test_fraction, std::uint64_t seed);

/// Splits and refits the scaler on the training rows only; the test rows are
/// transformed with the training scaler.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
void write_scaler(const Scaler& scaler, const std::filesystem::path& path);

/// Order-sensitive hash of features and labels, for report fingerprints.
std::string dataset_fingerprint(const Dataset& data);

}  // namespace kacdp
