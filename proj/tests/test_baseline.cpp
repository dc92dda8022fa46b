#include <doctest.h>

#include <cmath>

#include "kacdp/baseline.hpp"
#include "kacdp/error.hpp"
#include "kacdp/kernels.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace kacdp;

TEST_CASE("zero model predicts one half") {
  const LogisticModel m{std::vector<double>(10, 0.0), 0.0};
  CHECK(logistic_predict(m, std::vector<double>(10, 0.3)) == 0.5);
}

TEST_CASE("logit of ln 4 gives 0.8") {
  const LogisticModel m{{1.0, 0.0}, 0.0};
  CHECK(logistic_predict(m, std::vector<double>{std::log(4.0), 5.0}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(logistic_logit(m, std::vector<double>{1.0}), Error);
}

TEST_CASE("batch prediction matches an independent dot product") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  LogisticModel m{std::vector<double>(10), u(rng)};
  for (double& w : m.weights) w = u(rng);
  Matrix x;
  Labels y;
  toy::random_batch(64, 10, 4, x, y);
  const std::vector<double> p = logistic_predict_batch(m, x);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double z = m.bias;
    for (std::size_t j = 0; j < 10; ++j) z += m.weights[j] * x(i, j);
    CHECK(std::abs(p[i] - oracle::logistic(z)) < 1e-12);
  }
}

TEST_CASE("training on separable data") {
  Matrix x;
  Labels y;
  toy::separable(200, 1, x, y);
  TrainReport report;
  const LogisticModel m = train_logistic(x, y, 0.1, 500, 42, &report);
  REQUIRE(report.loss_history.size() == 500);
  CHECK(report.loss_history.back() < 0.05);
  CHECK(report.loss_history.front() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) loss += bce_with_logits(logistic_logit(m, x.row(i)), y[i]);
  CHECK(loss / static_cast<double>(x.rows) < 0.05);
  CHECK(m.weights[0] > 0.0);
  CHECK(m.weights[1] > 0.0);

  const LogisticModel again = train_logistic(x, y, 0.1, 500, 42);
  CHECK(again == m);
}
