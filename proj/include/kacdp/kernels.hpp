#pragma once

// Batch kernels over the samples of a dataset. Two implementations share one
// interface: `serial` is the straightforward reference built on the per-sample
// network API and is kept for tests and benchmarks; `omp` is the OpenMP path
// used by training and attribution.
//
// The OpenMP kernels split rows into fixed-size chunks and reduce the
// per-chunk partials in chunk order, so results are bitwise identical for any
// thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "kacdp/matrix.hpp"
#include "kacdp/network.hpp"

namespace kacdp {

inline constexpr std::size_t kChunkRows = 512;

struct LossAndGradient {
  double loss = 0.0;              // mean BCE-with-logits over the rows
  std::vector<double> gradient;   // canonical parameter order
};

/// Per-edge mean and population variance of phi over a set of samples,
/// indexed [layer][q * n_in + p].
struct EdgeMoments {
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> variance;
};

double bce_with_logits(double logit, int label);

namespace serial {

std::vector<double> batch_logits(const KanNetwork& net, const Matrix& x);
/// `rows` selects a subset of sample indices; empty means every row.
LossAndGradient loss_and_gradient(const KanNetwork& net, const Matrix& x, const Labels& y,
                                  std::span<const std::size_t> rows = {});
EdgeMoments edge_moments(const KanNetwork& net, const Matrix& x);

}  // namespace serial

namespace omp {

std::vector<double> batch_logits(const KanNetwork& net, const Matrix& x);
LossAndGradient loss_and_gradient(const KanNetwork& net, const Matrix& x, const Labels& y,
                                  std::span<const std::size_t> rows = {});
double mean_loss(const KanNetwork& net, const Matrix& x, const Labels& y,
                 std::span<const std::size_t> rows = {});
EdgeMoments edge_moments(const KanNetwork& net, const Matrix& x);

}  // namespace omp

}  // namespace kacdp
