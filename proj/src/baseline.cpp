#include "kacdp/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "kacdp/error.hpp"
#include "kacdp/network.hpp"

namespace kacdp {

double logistic_logit(const LogisticModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) {
    throw Error(ErrorKind::dimension_mismatch, "logistic model expects " + std::to_string(model.weights.size()) +
                                                   " features, got " + std::to_string(x.size()));
  }
  double z = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
  return z;
}

double logistic_predict(const LogisticModel& model, std::span<const double> x) {
  return sigmoid(logistic_logit(model, x));
}

std::vector<double> logistic_predict_batch(const LogisticModel& model, const Matrix& x) {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = logistic_predict(model, x.row(i));
  return out;
}

LogisticModel train_logistic(const Matrix& x, const Labels& y, double learning_rate, int steps,
                             std::uint64_t seed, TrainReport* report) {
  if (x.rows == 0) throw Error(ErrorKind::empty_batch, "training set is empty");
  if (y.size() != x.rows) throw Error(ErrorKind::dimension_mismatch, "label count differs from row count");
  TrainConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.steps = steps;
  cfg.seed = seed;
  cfg.widths = {static_cast<int>(x.cols), 1};
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = x.cols;
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  // parameter layout: weights, then bias
  std::vector<double> params(d + 1, 0.0);
  std::vector<double> grad(d + 1, 0.0);
  AdamState state(d + 1);
  LogisticModel model{std::vector<double>(d, 0.0), 0.0};
  TrainReport local;
  TrainReport& rep = report != nullptr ? *report : local;
  rep.loss_history.clear();

  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  if (positives == 0 || positives == y.size()) {
    rep.warnings.push_back("degenerate-dataset: training labels contain a single class");
  }

  for (int step = 1; step <= steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto row = x.row(i);
      const double z = logistic_logit(model, row);
      loss += bce_with_logits(z, y[i]);
      const double g = (sigmoid(z) - static_cast<double>(y[i])) * inv_n;
      for (std::size_t j = 0; j < d; ++j) grad[j] += g * row[j];
      grad[d] += g;
    }
    rep.loss_history.push_back(loss * inv_n);
    adam_step(params, grad, state, step, cfg);
    std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d), model.weights.begin());
    model.bias = params[d];
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return model;
}

LogisticModel train_logistic(const Dataset& data, double learning_rate, int steps, std::uint64_t seed,
                             TrainReport* report) {
  return train_logistic(data.features, data.labels, learning_rate, steps, seed, report);
}

}  // namespace kacdp
