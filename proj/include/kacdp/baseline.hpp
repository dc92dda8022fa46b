#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kacdp/dataset.hpp"
#include "kacdp/training.hpp"

namespace kacdp {

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

/// Full-batch Adam on the mean BCE-with-logits loss, starting from the zero
/// model. `seed` is recorded for reproducibility; the fit itself draws no
/// random numbers.
LogisticModel train_logistic(const Matrix& x, const Labels& y, double learning_rate, int steps,
                             std::uint64_t seed, TrainReport* report = nullptr);
LogisticModel train_logistic(const Dataset& data, double learning_rate, int steps, std::uint64_t seed,
                             TrainReport* report = nullptr);

double logistic_logit(const LogisticModel& model, std::span<const double> x);
double logistic_predict(const LogisticModel& model, std::span<const double> x);
std::vector<double> logistic_predict_batch(const LogisticModel& model, const Matrix& x);

}  // namespace kacdp
