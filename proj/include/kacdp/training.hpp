#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kacdp/dataset.hpp"
#include "kacdp/kernels.hpp"
#include "kacdp/network.hpp"

namespace kacdp {

struct TrainConfig {
  std::vector<int> widths{10, 4, 1};
  int grid_count = 30;
  int degree = 4;
  double learning_rate = 0.1;
  int steps = 100;
  long batch_size = -1;  // -1: full batch
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws invalid-config when an invariant is violated.
  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct TrainReport {
  std::vector<double> loss_history;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

struct TrainResult {
  KanNetwork net;
  TrainReport report;
};

/// One bias-corrected Adam update; `step` counts from 1.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, long step,
               const TrainConfig& cfg);

/// Mean BCE-with-logits loss over the batch and its gradient with respect to
/// every parameter, in canonical order.
LossAndGradient backward(const KanNetwork& net, const Matrix& x, const Labels& y);

TrainResult train(const Matrix& x, const Labels& y, const TrainConfig& cfg);
TrainResult train(const Dataset& data, const TrainConfig& cfg);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;  // entries above the magnitude floor
};

/// Compares backward() against central differences of the loss, one
/// parameter at a time. Entries whose analytic and numeric magnitudes are both
/// below `floor` are skipped.
GradCheckResult grad_check_detailed(const KanNetwork& net, const Matrix& x, const Labels& y, double eps,
                                    double floor = 1e-7);
double grad_check(const KanNetwork& net, const Matrix& x, const Labels& y, double eps);

/// Writes `step,loss` rows, steps counted from 1.
void write_loss_csv(const TrainReport& report, const std::string& path);

}  // namespace kacdp
