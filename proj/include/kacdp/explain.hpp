#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kacdp/matrix.hpp"
#include "kacdp/network.hpp"

namespace kacdp {

/// Per layer, an n_out x n_in matrix of edge influence scores.
struct EdgeScoreMatrix {
  std::vector<Matrix> layers;
};

struct AttributionReport {
  std::vector<std::string> feature_names;
  std::vector<double> scores;             // raw
  std::vector<double> normalized_scores;  // raw / sum(raw)
  std::vector<std::size_t> ranking;       // feature indices, most important first
  std::string dataset_fingerprint;
  std::string model_fingerprint;

  /// 1-based rank of feature p.
  std::size_t rank_of(std::size_t p) const;
};

inline constexpr double kAttributionDivisionGuard = 1e-12;

/// Population standard deviation of every edge output over the samples.
EdgeScoreMatrix edge_scores(const KanNetwork& net, const Matrix& samples);

/// Backward propagation of edge scores from the output node (score 1) to the
/// inputs. Hidden node scores split each node's score over its incoming edges
/// in proportion to their edge scores; a feature's raw score is
/// sum_q N_{1,q} * E_{0,q,p}.
AttributionReport attribution_from_scores(const KanNetwork& net, const EdgeScoreMatrix& scores);
AttributionReport feature_attribution(const KanNetwork& net, const Matrix& samples);

std::string attribution_csv(const AttributionReport& report);

/// Graphviz digraph of the network, edges labelled with their scores and
/// pen widths proportional to the score relative to the layer maximum.
std::string export_dot(const KanNetwork& net, const EdgeScoreMatrix& scores);

struct EdgeContribution {
  std::size_t layer = 0;
  std::size_t q = 0;
  std::size_t p = 0;
  double input = 0.0;
  double phi = 0.0;
  double share = 0.0;  // phi / node sum, 0 when the node sum is 0
  double node_sum = 0.0;
};

struct DecisionPath {
  ForwardTrace trace;
  std::vector<EdgeContribution> edges;  // layer, then q, then p
  double logit = 0.0;
  double probability = 0.0;
};

DecisionPath decision_path(const KanNetwork& net, std::span<const double> sample);
std::string decision_path_text(const KanNetwork& net, const DecisionPath& path);
std::string decision_path_csv(const DecisionPath& path);

struct CurveRow {
  std::size_t layer = 0;
  std::size_t q = 0;
  std::size_t p = 0;
  double x = 0.0;
  double phi = 0.0;
};

/// Every edge evaluated at `points_per_edge` uniform points over [-1, 1].
std::vector<CurveRow> sample_activation_curves(const KanNetwork& net, int points_per_edge);
std::string curves_csv(const std::vector<CurveRow>& rows);

}  // namespace kacdp
