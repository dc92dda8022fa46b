#include "kacdp/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "kacdp/error.hpp"

namespace kacdp {

namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::length_mismatch, "scores and labels differ in length");
  }
  if (scores.empty()) throw Error(ErrorKind::empty_input, "no samples to evaluate");
}

// Sample indices ordered by descending score.
std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const std::uint8_t> labels) {
  std::size_t pos = 0;
  for (auto l : labels) pos += (l != 0) ? 1 : 0;
  return {pos, labels.size() - pos};
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion_at_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                       double threshold, int positive_class) {
  check_inputs(scores, labels);
  if (positive_class != 0 && positive_class != 1) {
    throw Error(ErrorKind::invalid_label, "positive class must be 0 or 1");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = positive_class == 1 ? scores[i] : 1.0 - scores[i];
    const bool predicted = s >= threshold;
    const bool actual = (labels[i] != 0) == (positive_class == 1);
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c) {
  PrecisionRecallF1 out;
  out.precision = ratio(c.tp, c.tp + c.fp);
  out.recall = ratio(c.tp, c.tp + c.fn);
  const double denom = out.precision + out.recall;
  out.f1 = denom == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / denom;
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw Error(ErrorKind::single_class_input, "AUC needs both classes");

  // Walk tied groups from the highest score down. Every positive in a group
  // beats all negatives below it and ties with the negatives inside it; wins
  // are doubled so a tie contributes 1 and the count stays integral.
  const std::vector<std::size_t> order = descending_order(scores);
  std::uint64_t twice_wins = 0;
  std::size_t neg_below = neg;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    std::size_t group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? group_pos : group_neg) += 1;
      ++j;
    }
    neg_below -= group_neg;
    twice_wins += static_cast<std::uint64_t>(group_pos) * (2 * neg_below + group_neg);
    i = j;
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels);
  const auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw Error(ErrorKind::single_class_input, "ROC curve needs both classes");

  const std::vector<std::size_t> order = descending_order(scores);
  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (labels[order[i]] != 0 ? tp : fp) += 1;
      ++i;
    }
    curve.push_back({ratio(fp, neg), ratio(tp, pos), thr});
  }
  return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  long double area = 0.0L;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += static_cast<long double>(curve[i].fpr - curve[i - 1].fpr) *
            (static_cast<long double>(curve[i].tpr) + curve[i - 1].tpr) / 2.0L;
  }
  return static_cast<double>(area);
}

MetricReport evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold) {
  MetricReport r;
  r.samples = scores.size();
  r.threshold = threshold;
  r.roc_auc = roc_auc(scores, labels);
  r.majority = confusion_at_threshold(scores, labels, threshold, 0);
  r.majority_prf = precision_recall_f1(r.majority);
  r.minority = confusion_at_threshold(scores, labels, threshold, 1);
  r.minority_prf = precision_recall_f1(r.minority);
  return r;
}

std::string format_metric_report(const MetricReport& r, const std::string& prefix) {
  std::string out;
  auto line = [&](std::string_view key, const auto& value) {
    out += fmt::format("{}{}={}\n", prefix, key, value);
  };
  line("samples", r.samples);
  line("roc_auc", r.roc_auc);
  line("threshold", r.threshold);
  line("f1", r.majority_prf.f1);
  line("f1_positive_class", 0);
  line("precision_class0", r.majority_prf.precision);
  line("recall_class0", r.majority_prf.recall);
  line("f1_class0", r.majority_prf.f1);
  line("precision_class1", r.minority_prf.precision);
  line("recall_class1", r.minority_prf.recall);
  line("f1_class1", r.minority_prf.f1);
  line("tp_class1", r.minority.tp);
  line("fp_class1", r.minority.fp);
  line("tn_class1", r.minority.tn);
  line("fn_class1", r.minority.fn);
  return out;
}

void write_roc_csv(const std::vector<RocPoint>& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve) out << fmt::format("{},{},{}\n", p.threshold, p.fpr, p.tpr);
}

}  // namespace kacdp
