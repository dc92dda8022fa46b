
#include <algorithm>
#include <cmath>

#include "kacdp/kernels.hpp"
#include "kernel_common.hpp"

namespace kacdp::omp {

namespace {

// Per-thread scratch for one forward/backward pass. The local basis of an
// input is computed once per (layer, input) and shared by all n_out edges
// leaving that input.
class SampleEngine {
 public:
  explicit SampleEngine(const KanNetwork& net) : net_(net), width_(static_cast<std::size_t>(net.degree) + 1) {
    const std::size_t depth = net.layers.size();
    act_.resize(depth + 1);
    first_.resize(depth);
    basis_.resize(depth);
    dbasis_.resize(depth);
    silu_.resize(depth);
    dsilu_.resize(depth);
    spline_.resize(depth);
    phi_.resize(depth);
    for (std::size_t l = 0; l < depth; ++l) {
      const KanLayer& layer = net.layers[l];
      act_[l].resize(layer.n_in);
      first_[l].resize(layer.n_in);
      basis_[l].resize(layer.n_in * width_);
      dbasis_[l].assign(layer.n_in * width_, 0.0);
      silu_[l].resize(layer.n_in);
      dsilu_[l].resize(layer.n_in);
      spline_[l].resize(layer.edges.size());
      phi_[l].resize(layer.edges.size());
    }
    act_[depth].resize(1);
  }

  // Returns the logit. Input derivatives are prepared only for layers > 0,
  // since nothing upstream of the features needs a gradient. Degree-0
  // splines are piecewise constant and contribute no input derivative.
  double forward(std::span<const double> x, bool for_backward) {
    std::copy(x.begin(), x.end(), act_[0].begin());
    const bool derivs = for_backward && net_.degree > 0;
    for (std::size_t l = 0; l < net_.layers.size(); ++l) {
      const KanLayer& layer = net_.layers[l];
      for (std::size_t p = 0; p < layer.n_in; ++p) {
        const double xin = act_[l][p];
        std::span<double> b(basis_[l].data() + p * width_, width_);
        if (derivs && l > 0) {
          std::span<double> db(dbasis_[l].data() + p * width_, width_);
          first_[l][p] = local_basis_with_derivatives(layer.knots, xin, b, db);
        } else {
          first_[l][p] = local_basis(layer.knots, xin, b);
        }
        if (for_backward && l > 0) dsilu_[l][p] = silu_derivative(xin);
        silu_[l][p] = silu(xin);
      }
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        double sum = 0.0;
        for (std::size_t p = 0; p < layer.n_in; ++p) {
          const std::size_t e = q * layer.n_in + p;
          const ActivationEdge& edge = layer.edges[e];
          const double* c = edge.spline.coefficients.data() + first_[l][p];
          const double* b = basis_[l].data() + p * width_;
          double s = 0.0;
          for (std::size_t j = 0; j < width_; ++j) s += c[j] * b[j];
          const double phi = edge.w_b * silu_[l][p] + edge.w_s * s;
          spline_[l][e] = s;
          phi_[l][e] = phi;
          sum += phi;
        }
        act_[l + 1][q] = sum;
      }
    }
    return act_.back()[0];
  }

  // Adds d(loss)/d(theta) to `grad` given d(loss)/d(logit); forward() must
  // have run with for_backward = true.
  void backward(double grad_logit, double* grad) {
    grad_out_.assign(1, grad_logit);
    std::size_t offset = net_.parameter_count();
    for (std::size_t l = net_.layers.size(); l-- > 0;) {
      const KanLayer& layer = net_.layers[l];
      const std::size_t stride = layer.edge_stride();
      offset -= layer.parameter_count();
      grad_in_.assign(layer.n_in, 0.0);
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        const double gq = grad_out_[q];
        for (std::size_t p = 0; p < layer.n_in; ++p) {
          const std::size_t e = q * layer.n_in + p;
          const ActivationEdge& edge = layer.edges[e];
          double* g = grad + offset + e * stride;
          g[0] += gq * silu_[l][p];
          g[1] += gq * spline_[l][e];
          const std::size_t first = first_[l][p];
          const double* b = basis_[l].data() + p * width_;
          const double scale = gq * edge.w_s;
          for (std::size_t j = 0; j < width_; ++j) g[2 + first + j] += scale * b[j];
          if (l == 0) continue;
          const double* c = edge.spline.coefficients.data() + first;
          const double* db = dbasis_[l].data() + p * width_;
          double ds = 0.0;
          for (std::size_t j = 0; j < width_; ++j) ds += c[j] * db[j];
          grad_in_[p] += gq * (edge.w_b * dsilu_[l][p] + edge.w_s * ds);
        }
      }
      std::swap(grad_out_, grad_in_);
    }
  }

  const std::vector<double>& edge_outputs(std::size_t l) const { return phi_[l]; }

 private:
  const KanNetwork& net_;
  std::size_t width_;
  std::vector<std::vector<double>> act_;
  std::vector<std::vector<std::size_t>> first_;
  std::vector<std::vector<double>> basis_;
  std::vector<std::vector<double>> dbasis_;
  std::vector<std::vector<double>> silu_;
  std::vector<std::vector<double>> dsilu_;
  std::vector<std::vector<double>> spline_;
  std::vector<std::vector<double>> phi_;
  std::vector<double> grad_out_;
  std::vector<double> grad_in_;
};

std::size_t chunk_count(std::size_t n) { return (n + kChunkRows - 1) / kChunkRows; }

}  // namespace

std::vector<double> batch_logits(const KanNetwork& net, const Matrix& x) {
  detail::check_features(net, x);
  std::vector<double> out(x.rows);
  const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(x.rows));
#pragma omp parallel
  {
    SampleEngine engine(net);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
      const std::size_t end = std::min(x.rows, begin + kChunkRows);
      for (std::size_t i = begin; i < end; ++i) out[i] = engine.forward(x.row(i), false);
    }
  }
  return out;
}

LossAndGradient loss_and_gradient(const KanNetwork& net, const Matrix& x, const Labels& y,
                                  std::span<const std::size_t> rows) {
  const std::size_t n = detail::check_batch(net, x, y, rows);
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t nparams = net.parameter_count();
  const std::size_t nchunks = chunk_count(n);

  std::vector<double> partial(nchunks * nparams, 0.0);
  std::vector<double> chunk_loss(nchunks, 0.0);
#pragma omp parallel
  {
    SampleEngine engine(net);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
      const std::size_t end = std::min(n, begin + kChunkRows);
      double* grad = partial.data() + static_cast<std::size_t>(c) * nparams;
      double loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows.empty() ? i : rows[i];
        const double z = engine.forward(x.row(r), true);
        loss += bce_with_logits(z, y[r]);
        engine.backward((sigmoid(z) - static_cast<double>(y[r])) * inv_n, grad);
      }
      chunk_loss[static_cast<std::size_t>(c)] = loss;
    }
  }

  LossAndGradient result;
  result.gradient.assign(nparams, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(nparams); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < nchunks; ++c) s += partial[c * nparams + static_cast<std::size_t>(k)];
    result.gradient[static_cast<std::size_t>(k)] = s;
  }
  double loss_sum = 0.0;
  for (double l : chunk_loss) loss_sum += l;
  result.loss = loss_sum * inv_n;
  return result;
}

double mean_loss(const KanNetwork& net, const Matrix& x, const Labels& y, std::span<const std::size_t> rows) {
  const std::size_t n = detail::check_batch(net, x, y, rows);
  const std::size_t nchunks = chunk_count(n);
  std::vector<double> chunk_loss(nchunks, 0.0);
#pragma omp parallel
  {
    SampleEngine engine(net);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
      const std::size_t end = std::min(n, begin + kChunkRows);
      double loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows.empty() ? i : rows[i];
        loss += bce_with_logits(engine.forward(x.row(r), false), y[r]);
      }
      chunk_loss[static_cast<std::size_t>(c)] = loss;
    }
  }
  double loss_sum = 0.0;
  for (double l : chunk_loss) loss_sum += l;
  return loss_sum / static_cast<double>(n);
}

EdgeMoments edge_moments(const KanNetwork& net, const Matrix& x) {
  detail::check_features(net, x);
  const std::size_t depth = net.layers.size();
  const std::size_t nchunks = chunk_count(x.rows);

  struct Partial {
    double count = 0.0;
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> m2;
  };
  std::vector<Partial> partials(nchunks);
#pragma omp parallel
  {
    SampleEngine engine(net);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      Partial& part = partials[static_cast<std::size_t>(c)];
      for (const auto& layer : net.layers) {
        part.mean.emplace_back(layer.edges.size(), 0.0);
        part.m2.emplace_back(layer.edges.size(), 0.0);
      }
      const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
      const std::size_t end = std::min(x.rows, begin + kChunkRows);
      for (std::size_t i = begin; i < end; ++i) {
        engine.forward(x.row(i), false);
        part.count += 1.0;
        for (std::size_t l = 0; l < depth; ++l) {
          const auto& phi = engine.edge_outputs(l);
          for (std::size_t e = 0; e < phi.size(); ++e) {
            const double delta = phi[e] - part.mean[l][e];
            part.mean[l][e] += delta / part.count;
            part.m2[l][e] += delta * (phi[e] - part.mean[l][e]);
          }
        }
      }
    }
  }

  // Chan et al. pairwise merge, in chunk order.
  EdgeMoments out;
  std::vector<std::vector<double>> m2;
  for (const auto& layer : net.layers) {
    out.mean.emplace_back(layer.edges.size(), 0.0);
    m2.emplace_back(layer.edges.size(), 0.0);
  }
  double count = 0.0;
  for (const Partial& part : partials) {
    const double total = count + part.count;
    for (std::size_t l = 0; l < depth; ++l) {
      for (std::size_t e = 0; e < out.mean[l].size(); ++e) {
        const double delta = part.mean[l][e] - out.mean[l][e];
        out.mean[l][e] += delta * part.count / total;
        m2[l][e] += part.m2[l][e] + delta * delta * count * part.count / total;
      }
    }
    count = total;
  }
  out.variance = std::move(m2);
  if (count > 0.0) {
    for (auto& layer : out.variance) {
      for (auto& v : layer) v = std::max(0.0, v / count);
    }
  }
  return out;
}

}  // namespace kacdp::omp
