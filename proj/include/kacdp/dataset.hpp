#pragma once

#include <string>
#include <vector>

#include "kacdp/matrix.hpp"

namespace kacdp {

inline constexpr std::size_t kFeatureCount = 10;

struct PreprocessPolicy {
  double lower_percentile = 0.01;
  double upper_percentile = 0.99;

  friend bool operator==(const PreprocessPolicy&, const PreprocessPolicy&) = default;
};

/// Affine map of one winsorized column onto [-1, 1].
struct ColumnScaler {
  double clip_low = 0.0;   // winsorization bounds
  double clip_high = 0.0;
  double min = 0.0;        // range of the winsorized training column
  double max = 0.0;

  double apply(double raw) const noexcept;

  friend bool operator==(const ColumnScaler&, const ColumnScaler&) = default;
};

struct Scaler {
  std::vector<ColumnScaler> columns;
  double income_fill = 0.0;      // median of observed MonthlyIncome
  double dependents_fill = 0.0;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Preprocessed samples. `features` is the normalized model input; `raw`
/// keeps the unscaled values (NaN where missing) so a split can refit the
/// scaler on its training rows alone.
struct Dataset {
  Matrix features;
  Labels labels;
  std::vector<std::string> feature_names;
  Scaler scaler;
  PreprocessPolicy policy;
  Matrix raw;

  std::size_t size() const noexcept { return labels.size(); }
};

}  // namespace kacdp
