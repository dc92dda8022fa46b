// Reference kernels: every sample goes through the public per-sample API
// (network_forward, basis_values, basis_derivatives) and is accumulated in
// row order. Slow, but each step maps directly onto the model equations.

#include <algorithm>
#include <cmath>

#include "kacdp/kernels.hpp"
#include "kernel_common.hpp"

namespace kacdp::serial {

std::vector<double> batch_logits(const KanNetwork& net, const Matrix& x) {
  detail::check_features(net, x);
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = network_forward(net, x.row(i)).logit;
  return out;
}

LossAndGradient loss_and_gradient(const KanNetwork& net, const Matrix& x, const Labels& y,
                                  std::span<const std::size_t> rows) {
  const std::size_t n = detail::check_batch(net, x, y, rows);
  const double inv_n = 1.0 / static_cast<double>(n);

  LossAndGradient result;
  result.gradient.assign(net.parameter_count(), 0.0);
  double loss_sum = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = rows.empty() ? i : rows[i];
    const ForwardTrace trace = network_forward(net, x.row(r));
    loss_sum += bce_with_logits(trace.logit, y[r]);

    std::vector<double> grad_out{(sigmoid(trace.logit) - static_cast<double>(y[r])) * inv_n};
    for (std::size_t l = net.layers.size(); l-- > 0;) {
      const KanLayer& layer = net.layers[l];
      const std::size_t base = net.layer_offset(l);
      const std::size_t stride = layer.edge_stride();
      std::vector<double> grad_in(layer.n_in, 0.0);
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        for (std::size_t p = 0; p < layer.n_in; ++p) {
          const ActivationEdge& e = layer.edge(q, p);
          const double xin = trace.inputs[l][p];
          const std::vector<double> basis = basis_values(layer.knots, xin);
          const double spline = eval_spline(e.spline, layer.knots, xin);
          double* g = result.gradient.data() + base + (q * layer.n_in + p) * stride;
          g[0] += grad_out[q] * silu(xin);
          g[1] += grad_out[q] * spline;
          for (std::size_t c = 0; c < basis.size(); ++c) g[2 + c] += grad_out[q] * e.w_s * basis[c];
          if (l == 0) continue;
          double dspline = 0.0;
          if (layer.knots.degree > 0) {
            const std::vector<double> dbasis = basis_derivatives(layer.knots, xin);
            for (std::size_t c = 0; c < dbasis.size(); ++c) dspline += e.spline.coefficients[c] * dbasis[c];
          }
          grad_in[p] += grad_out[q] * (e.w_b * silu_derivative(xin) + e.w_s * dspline);
        }
      }
      grad_out = std::move(grad_in);
    }
  }
  result.loss = loss_sum * inv_n;
  return result;
}

EdgeMoments edge_moments(const KanNetwork& net, const Matrix& x) {
  detail::check_features(net, x);
  EdgeMoments m;
  std::vector<std::vector<double>> m2;
  for (const auto& layer : net.layers) {
    m.mean.emplace_back(layer.edges.size(), 0.0);
    m2.emplace_back(layer.edges.size(), 0.0);
  }
  // Welford's running update, one sample at a time.
  for (std::size_t i = 0; i < x.rows; ++i) {
    const ForwardTrace trace = network_forward(net, x.row(i));
    const double count = static_cast<double>(i + 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t e = 0; e < trace.edge_outputs[l].size(); ++e) {
        const double v = trace.edge_outputs[l][e];
        const double delta = v - m.mean[l][e];
        m.mean[l][e] += delta / count;
        m2[l][e] += delta * (v - m.mean[l][e]);
      }
    }
  }
  m.variance = std::move(m2);
  if (x.rows > 0) {
    for (auto& layer : m.variance) {
      for (auto& v : layer) v = std::max(0.0, v / static_cast<double>(x.rows));
    }
  }
  return m;
}

}  // namespace kacdp::serial
