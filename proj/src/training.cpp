#include "kacdp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "kacdp/error.hpp"

namespace kacdp {

double bce_with_logits(double logit, int label) {
  if (label != 0 && label != 1) {
    throw Error(ErrorKind::invalid_label, "label must be 0 or 1, got " + std::to_string(label));
  }
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

void TrainConfig::validate() const {
  if (widths.size() < 2 || widths.back() != 1 ||
      std::any_of(widths.begin(), widths.end(), [](int w) { return w < 1; })) {
    throw Error(ErrorKind::invalid_widths, "widths need >= 2 positive entries ending in 1");
  }
  if (grid_count < 1) throw Error(ErrorKind::invalid_grid, "grid must be >= 1");
  if (degree < 0 || degree > kMaxDegree) throw Error(ErrorKind::unsupported_degree, "k out of range");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::invalid_config, "learning rate must be positive");
  }
  if (steps < 1) throw Error(ErrorKind::invalid_config, "steps must be >= 1");
  if (batch_size != -1 && batch_size < 1) throw Error(ErrorKind::invalid_config, "batch size must be -1 or >= 1");
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, long step,
               const TrainConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(ErrorKind::length_mismatch, "adam vectors differ in length");
  }
  if (step < 1) throw Error(ErrorKind::invalid_config, "adam step index starts at 1");
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
  }
}

LossAndGradient backward(const KanNetwork& net, const Matrix& x, const Labels& y) {
  return omp::loss_and_gradient(net, x, y);
}

TrainResult train(const Matrix& x, const Labels& y, const TrainConfig& cfg) {
  cfg.validate();
  if (x.rows == 0) throw Error(ErrorKind::empty_batch, "training set is empty");
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.net = init_network(cfg.widths, cfg.grid_count, cfg.degree, cfg.seed);
  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  if (positives == 0 || positives == y.size()) {
    result.report.warnings.push_back("degenerate-dataset: training labels contain a single class");
  }

  const bool full_batch = cfg.batch_size == -1 || static_cast<std::size_t>(cfg.batch_size) >= x.rows;
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> batch;
  std::mt19937_64 batch_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  AdamState state(result.net.parameter_count());
  std::vector<double> params = result.net.parameters();
  result.report.loss_history.reserve(static_cast<std::size_t>(cfg.steps));
  for (int step = 1; step <= cfg.steps; ++step) {
    if (!full_batch) {
      // Partial Fisher-Yates: the first batch_size entries become a uniform
      // draw without replacement.
      const auto b = static_cast<std::size_t>(cfg.batch_size);
      for (std::size_t i = 0; i < b; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(batch_rng)]);
      }
      batch.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b));
    }
    const LossAndGradient lg = omp::loss_and_gradient(result.net, x, y, batch);
    if (!std::isfinite(lg.loss)) {
      throw Error(ErrorKind::numerical_failure, fmt::format("loss became non-finite at step {}", step));
    }
    result.report.loss_history.push_back(lg.loss);
    adam_step(params, lg.gradient, state, step, cfg);
    result.net.set_parameters(params);
  }
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) { return train(data.features, data.labels, cfg); }

GradCheckResult grad_check_detailed(const KanNetwork& net, const Matrix& x, const Labels& y, double eps,
                                    double floor) {
  const LossAndGradient analytic = backward(net, x, y);
  std::vector<double> params = net.parameters();
  KanNetwork probe = net;
  GradCheckResult out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    probe.set_parameters(params);
    const double up = omp::mean_loss(probe, x, y);
    params[i] = saved - eps;
    probe.set_parameters(params);
    const double down = omp::mean_loss(probe, x, y);
    params[i] = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic.gradient[i];
    const double scale = std::max(std::abs(a), std::abs(numeric));
    if (scale <= floor) continue;
    ++out.checked;
    const double rel = std::abs(a - numeric) / scale;
    if (rel > out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

double grad_check(const KanNetwork& net, const Matrix& x, const Labels& y, double eps) {
  return grad_check_detailed(net, x, y, eps).max_relative_error;
}

void write_loss_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << "step,loss\n";
  for (std::size_t i = 0; i < report.loss_history.size(); ++i) {
    out << fmt::format("{},{}\n", i + 1, report.loss_history[i]);
  }
}

}  // namespace kacdp
