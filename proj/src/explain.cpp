#include "kacdp/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "kacdp/checkpoint.hpp"
#include "kacdp/data.hpp"
#include "kacdp/error.hpp"
#include "kacdp/kernels.hpp"

namespace kacdp {

std::size_t AttributionReport::rank_of(std::size_t p) const {
  const auto it = std::find(ranking.begin(), ranking.end(), p);
  return static_cast<std::size_t>(it - ranking.begin()) + 1;
}

EdgeScoreMatrix edge_scores(const KanNetwork& net, const Matrix& samples) {
  if (samples.rows == 0) throw Error(ErrorKind::empty_input, "edge scores need at least one sample");
  const EdgeMoments moments = omp::edge_moments(net, samples);
  EdgeScoreMatrix out;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const KanLayer& layer = net.layers[l];
    Matrix m(layer.n_out, layer.n_in);
    for (std::size_t e = 0; e < layer.edges.size(); ++e) m.values[e] = std::sqrt(moments.variance[l][e]);
    out.layers.push_back(std::move(m));
  }
  return out;
}

static void check_shape(const KanNetwork& net, const EdgeScoreMatrix& scores) {
  bool ok = scores.layers.size() == net.layers.size();
  for (std::size_t l = 0; ok && l < net.layers.size(); ++l) {
    ok = scores.layers[l].rows == net.layers[l].n_out && scores.layers[l].cols == net.layers[l].n_in;
  }
  if (!ok) throw Error(ErrorKind::shape_mismatch, "edge score matrix does not match the network");
}

AttributionReport attribution_from_scores(const KanNetwork& net, const EdgeScoreMatrix& scores) {
  check_shape(net, scores);
  // node scores of the current layer's outputs; the logit node starts at 1
  std::vector<double> node(net.layers.back().n_out, 1.0);
  for (std::size_t l = net.layers.size(); l-- > 1;) {
    const Matrix& e = scores.layers[l];
    std::vector<double> below(e.cols, 0.0);
    for (std::size_t q = 0; q < e.rows; ++q) {
      double incoming = 0.0;
      for (std::size_t p = 0; p < e.cols; ++p) incoming += e(q, p);
      const double share = node[q] / std::max(incoming, kAttributionDivisionGuard);
      for (std::size_t p = 0; p < e.cols; ++p) below[p] += share * e(q, p);
    }
    node = std::move(below);
  }

  const Matrix& first = scores.layers.front();
  AttributionReport r;
  r.scores.assign(first.cols, 0.0);
  for (std::size_t q = 0; q < first.rows; ++q) {
    for (std::size_t p = 0; p < first.cols; ++p) r.scores[p] += node[q] * first(q, p);
  }
  const double total = std::accumulate(r.scores.begin(), r.scores.end(), 0.0);
  r.normalized_scores.resize(r.scores.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t p = 0; p < r.scores.size(); ++p) r.normalized_scores[p] = r.scores[p] / total;
  }
  r.ranking.resize(r.scores.size());
  std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
  std::stable_sort(r.ranking.begin(), r.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  for (std::size_t p = 0; p < r.scores.size(); ++p) r.feature_names.push_back(fmt::format("x{}", p));
  r.model_fingerprint = model_fingerprint(net);
  return r;
}

AttributionReport feature_attribution(const KanNetwork& net, const Matrix& samples) {
  AttributionReport r = attribution_from_scores(net, edge_scores(net, samples));
  Dataset view;
  view.features = samples;
  r.dataset_fingerprint = dataset_fingerprint(view);
  return r;
}

std::string attribution_csv(const AttributionReport& r) {
  std::string out = "feature,score,normalized_score,rank\n";
  for (std::size_t p = 0; p < r.scores.size(); ++p) {
    out += fmt::format("{},{},{},{}\n", r.feature_names[p], r.scores[p], r.normalized_scores[p], r.rank_of(p));
  }
  return out;
}

namespace {

std::string node_id(std::size_t layer, std::size_t i) { return fmt::format("n{}_{}", layer, i); }

std::string node_label(const KanNetwork& net, std::size_t layer, std::size_t i) {
  if (layer == 0) {
    if (net.input_dim() == kFeatureCount) return fmt::format("x{}\\n{}", i, kFeatureLegend[i]);
    return fmt::format("x{}", i);
  }
  if (layer == net.layers.size()) return "logit";
  return fmt::format("h{}_{}", layer, i);
}

}  // namespace

std::string export_dot(const KanNetwork& net, const EdgeScoreMatrix& scores) {
  check_shape(net, scores);
  std::string out = "digraph kan {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
  for (std::size_t layer = 0; layer <= net.layers.size(); ++layer) {
    const std::size_t width = static_cast<std::size_t>(net.widths[layer]);
    out += fmt::format("  subgraph layer{} {{\n    rank=same;\n", layer);
    for (std::size_t i = 0; i < width; ++i) {
      const char* shape = layer == 0 ? "box" : layer == net.layers.size() ? "doublecircle" : "circle";
      out += fmt::format("    {} [label=\"{}\", shape={}];\n", node_id(layer, i), node_label(net, layer, i), shape);
    }
    out += "  }\n";
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Matrix& e = scores.layers[l];
    const double top = e.values.empty() ? 0.0 : *std::max_element(e.values.begin(), e.values.end());
    for (std::size_t q = 0; q < e.rows; ++q) {
      for (std::size_t p = 0; p < e.cols; ++p) {
        const double rel = top > 0.0 ? e(q, p) / top : 0.0;
        out += fmt::format("  {} -> {} [label=\"{:.4f}\", penwidth={:.3f}];\n", node_id(l, p), node_id(l + 1, q),
                           e(q, p), 0.5 + 4.5 * rel);
      }
    }
  }
  out += "}\n";
  return out;
}

DecisionPath decision_path(const KanNetwork& net, std::span<const double> sample) {
  DecisionPath path;
  path.trace = network_forward(net, sample);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const KanLayer& layer = net.layers[l];
    for (std::size_t q = 0; q < layer.n_out; ++q) {
      const double node_sum = path.trace.node_sums[l][q];
      for (std::size_t p = 0; p < layer.n_in; ++p) {
        EdgeContribution c;
        c.layer = l;
        c.q = q;
        c.p = p;
        c.input = path.trace.inputs[l][p];
        c.phi = path.trace.edge_outputs[l][q * layer.n_in + p];
        c.node_sum = node_sum;
        c.share = node_sum == 0.0 ? 0.0 : c.phi / node_sum;
        path.edges.push_back(c);
      }
    }
  }
  path.logit = path.trace.logit;
  path.probability = sigmoid(path.logit);
  return path;
}

std::string decision_path_text(const KanNetwork& net, const DecisionPath& path) {
  std::string out;
  std::size_t at = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const KanLayer& layer = net.layers[l];
    out += fmt::format("layer {} ({} -> {})\n", l, layer.n_in, layer.n_out);
    for (std::size_t q = 0; q < layer.n_out; ++q) {
      out += fmt::format("  node {} = {}\n", node_label(net, l + 1, q), path.trace.node_sums[l][q]);
      for (std::size_t p = 0; p < layer.n_in; ++p, ++at) {
        const EdgeContribution& c = path.edges[at];
        out += fmt::format("    phi({} = {:.6f}) = {:+.6f}  share {:+.4f}\n", l == 0 ? fmt::format("x{}", p)
                                                                                      : fmt::format("h{}_{}", l, p),
                           c.input, c.phi, c.share);
      }
    }
  }
  out += fmt::format("logit={}\nprobability={}\n", path.logit, path.probability);
  return out;
}

std::string decision_path_csv(const DecisionPath& path) {
  std::string out = "layer,q,p,input,phi,share,node_sum\n";
  for (const auto& c : path.edges) {
    out += fmt::format("{},{},{},{},{},{},{}\n", c.layer, c.q, c.p, c.input, c.phi, c.share, c.node_sum);
  }
  return out;
}

std::vector<CurveRow> sample_activation_curves(const KanNetwork& net, int points_per_edge) {
  if (points_per_edge < 2) throw Error(ErrorKind::invalid_point_count, "need at least 2 points per edge");
  const auto n = static_cast<std::size_t>(points_per_edge);
  std::vector<CurveRow> rows;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const KanLayer& layer = net.layers[l];
    for (std::size_t q = 0; q < layer.n_out; ++q) {
      for (std::size_t p = 0; p < layer.n_in; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
          const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
          rows.push_back({l, q, p, x, edge_forward(layer.edge(q, p), layer.knots, x)});
        }
      }
    }
  }
  return rows;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::string out = "layer,q,p,x,phi\n";
  for (const auto& r : rows) out += fmt::format("{},{},{},{},{}\n", r.layer, r.q, r.p, r.x, r.phi);
  return out;
}

}  // namespace kacdp
