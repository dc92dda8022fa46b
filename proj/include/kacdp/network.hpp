#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kacdp/spline.hpp"

namespace kacdp {

/// One learnable univariate function phi(x) = w_b * silu(x) + w_s * spline(x).
struct ActivationEdge {
  double w_b = 1.0;
  double w_s = 1.0;
  SplineParams spline;

  friend bool operator==(const ActivationEdge&, const ActivationEdge&) = default;
};

/// A KAN layer: n_out x n_in edges sharing one knot vector. Edges are stored
/// row-major, edge (q, p) at q * n_in + p.
struct KanLayer {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  KnotVector knots;
  std::vector<ActivationEdge> edges;

  const ActivationEdge& edge(std::size_t q, std::size_t p) const { return edges[q * n_in + p]; }
  ActivationEdge& edge(std::size_t q, std::size_t p) { return edges[q * n_in + p]; }
  /// Parameters per edge: w_b, w_s and the spline coefficients.
  std::size_t edge_stride() const noexcept { return 2 + knots.basis_count(); }
  std::size_t parameter_count() const noexcept { return edges.size() * edge_stride(); }

  friend bool operator==(const KanLayer&, const KanLayer&) = default;
};

struct KanNetwork {
  std::vector<KanLayer> layers;
  std::vector<int> widths;
  int grid_count = 0;
  int degree = 0;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return layers.front().n_in; }
  std::size_t parameter_count() const;
  /// Offset of layer l's first parameter in the canonical flattening.
  std::size_t layer_offset(std::size_t l) const;

  // Canonical flattening: layer-major, then edges row-major (q outer, p
  // inner), then [w_b, w_s, c_0 .. c_{G+k-1}] per edge.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  friend bool operator==(const KanNetwork&, const KanNetwork&) = default;
};

/// Every intermediate of one forward pass. For layer l, inputs[l] has n_in
/// entries, edge_outputs[l] is n_out x n_in row-major, node_sums[l] has n_out.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> edge_outputs;
  std::vector<std::vector<double>> node_sums;
  double logit = 0.0;
};

struct LayerOutput {
  std::vector<double> y;
  std::vector<double> edge_outputs;  // n_out x n_in row-major
};

double sigmoid(double x) noexcept;
double silu(double x) noexcept;
double silu_derivative(double x) noexcept;

double edge_forward(const ActivationEdge& edge, const KnotVector& knots, double x);
LayerOutput layer_forward(const KanLayer& layer, std::span<const double> x);
ForwardTrace network_forward(const KanNetwork& net, std::span<const double> x);
double predict_proba(const KanNetwork& net, std::span<const double> x);

/// Builds a network over [-1, 1] grids with w_b = w_s = 1 and spline
/// coefficients drawn uniformly from [-0.1, 0.1].
KanNetwork init_network(const std::vector<int>& widths, int grid_count, int degree, std::uint64_t seed);

/// Throws dimension-mismatch unless the layers chain and match `widths`.
void validate_structure(const KanNetwork& net);

}  // namespace kacdp
