#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kacdp/matrix.hpp"

namespace kacdp {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Scores are probabilities of class 1. With positive_class = 0 the score of
/// a sample is taken as 1 - score and label 0 counts as the positive class.
ConfusionCounts confusion_at_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                       double threshold, int positive_class);

/// 0/0 resolves to 0 for every ratio.
PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c);

/// Mann-Whitney AUC with midranks for ties. Throws single-class-input.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// One point per distinct threshold in descending order, starting at (0, 0)
/// with threshold +inf and ending at (1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

double trapezoid_area(const std::vector<RocPoint>& curve);

/// Headline metric bundle reported by the CLI.
struct MetricReport {
  std::size_t samples = 0;
  double roc_auc = 0.0;
  double threshold = 0.5;
  ConfusionCounts majority;   // positive_class = 0
  PrecisionRecallF1 majority_prf;
  ConfusionCounts minority;   // positive_class = 1
  PrecisionRecallF1 minority_prf;
};

MetricReport evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold = 0.5);

/// key=value lines, every key prefixed with `prefix`.
std::string format_metric_report(const MetricReport& r, const std::string& prefix);

void write_roc_csv(const std::vector<RocPoint>& curve, const std::string& path);

}  // namespace kacdp
