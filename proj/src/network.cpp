#include "kacdp/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "kacdp/error.hpp"

namespace kacdp {

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double silu(double x) noexcept { return x * sigmoid(x); }

double silu_derivative(double x) noexcept {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

std::size_t KanNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.parameter_count();
  return n;
}

std::size_t KanNetwork::layer_offset(std::size_t l) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < l; ++i) n += layers[i].parameter_count();
  return n;
}

std::vector<double> KanNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers) {
    for (const auto& e : layer.edges) {
      flat.push_back(e.w_b);
      flat.push_back(e.w_s);
      flat.insert(flat.end(), e.spline.coefficients.begin(), e.spline.coefficients.end());
    }
  }
  return flat;
}

void KanNetwork::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw Error(ErrorKind::length_mismatch, "expected " + std::to_string(parameter_count()) +
                                                " parameters, got " + std::to_string(flat.size()));
  }
  std::size_t at = 0;
  for (auto& layer : layers) {
    for (auto& e : layer.edges) {
      e.w_b = flat[at++];
      e.w_s = flat[at++];
      for (auto& c : e.spline.coefficients) c = flat[at++];
    }
  }
}

double edge_forward(const ActivationEdge& edge, const KnotVector& knots, double x) {
  return edge.w_b * silu(x) + edge.w_s * eval_spline(edge.spline, knots, x);
}

LayerOutput layer_forward(const KanLayer& layer, std::span<const double> x) {
  if (x.size() != layer.n_in) {
    throw Error(ErrorKind::dimension_mismatch, "layer expects " + std::to_string(layer.n_in) +
                                                   " inputs, got " + std::to_string(x.size()));
  }
  LayerOutput out;
  out.y.assign(layer.n_out, 0.0);
  out.edge_outputs.assign(layer.n_out * layer.n_in, 0.0);
  for (std::size_t q = 0; q < layer.n_out; ++q) {
    double sum = 0.0;
    for (std::size_t p = 0; p < layer.n_in; ++p) {
      const double phi = edge_forward(layer.edge(q, p), layer.knots, x[p]);
      out.edge_outputs[q * layer.n_in + p] = phi;
      sum += phi;
    }
    out.y[q] = sum;
  }
  return out;
}

ForwardTrace network_forward(const KanNetwork& net, std::span<const double> x) {
  if (net.layers.empty() || x.size() != net.input_dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "network expects " + std::to_string(net.layers.empty() ? 0 : net.input_dim()) +
                    " features, got " + std::to_string(x.size()));
  }
  ForwardTrace trace;
  trace.inputs.reserve(net.layers.size());
  trace.edge_outputs.reserve(net.layers.size());
  trace.node_sums.reserve(net.layers.size());
  std::vector<double> current(x.begin(), x.end());
  for (const auto& layer : net.layers) {
    LayerOutput out = layer_forward(layer, current);
    trace.inputs.push_back(std::move(current));
    current = out.y;
    trace.edge_outputs.push_back(std::move(out.edge_outputs));
    trace.node_sums.push_back(std::move(out.y));
  }
  trace.logit = current.front();
  return trace;
}

double predict_proba(const KanNetwork& net, std::span<const double> x) {
  return sigmoid(network_forward(net, x).logit);
}

void validate_structure(const KanNetwork& net) {
  if (net.layers.empty() || net.widths.size() != net.layers.size() + 1) {
    throw Error(ErrorKind::dimension_mismatch, "layer count does not match widths");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (layer.n_in != static_cast<std::size_t>(net.widths[l]) ||
        layer.n_out != static_cast<std::size_t>(net.widths[l + 1])) {
      throw Error(ErrorKind::dimension_mismatch, "layer " + std::to_string(l) + " does not match widths");
    }
    if (layer.edges.size() != layer.n_in * layer.n_out) {
      throw Error(ErrorKind::dimension_mismatch, "layer " + std::to_string(l) + " has wrong edge count");
    }
    for (const auto& e : layer.edges) {
      if (e.spline.coefficients.size() != layer.knots.basis_count()) {
        throw Error(ErrorKind::length_mismatch, "edge spline does not match layer knots");
      }
    }
  }
  if (net.widths.back() != 1) {
    throw Error(ErrorKind::dimension_mismatch, "final width must be 1");
  }
}

KanNetwork init_network(const std::vector<int>& widths, int grid_count, int degree, std::uint64_t seed) {
  if (widths.size() < 2) throw Error(ErrorKind::invalid_widths, "need at least an input and an output width");
  for (int w : widths) {
    if (w < 1) throw Error(ErrorKind::invalid_widths, "every width must be >= 1");
  }
  if (widths.back() != 1) throw Error(ErrorKind::invalid_widths, "final width must be 1");

  KanNetwork net;
  net.widths = widths;
  net.grid_count = grid_count;
  net.degree = degree;
  net.seed = seed;
  const KnotVector knots = make_knot_vector(-1.0, 1.0, grid_count, degree);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-0.1, 0.1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    KanLayer layer;
    layer.n_in = static_cast<std::size_t>(widths[l]);
    layer.n_out = static_cast<std::size_t>(widths[l + 1]);
    layer.knots = knots;
    layer.edges.resize(layer.n_in * layer.n_out);
    for (auto& e : layer.edges) {
      e.w_b = 1.0;
      e.w_s = 1.0;
      e.spline.coefficients.resize(knots.basis_count());
      for (auto& c : e.spline.coefficients) c = coeff(rng);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace kacdp
