#pragma once

#include <random>

#include "kacdp/matrix.hpp"
#include "kacdp/network.hpp"

namespace toy {

// Two features in [-1, 1]^2, label = [x0 + x1 > 0], points within `margin`
// of the boundary rejected so the classes are linearly separable.
inline void separable(std::size_t n, std::uint64_t seed, kacdp::Matrix& x, kacdp::Labels& y, double margin = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  x = kacdp::Matrix(n, 2);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n;) {
    const double a = u(rng);
    const double b = u(rng);
    if (std::abs(a + b) < margin) continue;
    x(i, 0) = a;
    x(i, 1) = b;
    y[i] = a + b > 0 ? 1 : 0;
    ++i;
  }
}

inline void random_batch(std::size_t n, std::size_t d, std::uint64_t seed, kacdp::Matrix& x, kacdp::Labels& y,
                         double spread = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  std::bernoulli_distribution coin(0.4);
  x = kacdp::Matrix(n, d);
  y.assign(n, 0);
  for (double& v : x.values) v = u(rng);
  for (auto& l : y) l = coin(rng) ? 1 : 0;
}

// Every parameter drawn from U(-scale, scale).
inline kacdp::KanNetwork randomized(const std::vector<int>& widths, int grid, int degree, std::uint64_t seed,
                                    double scale = 1.0) {
  kacdp::KanNetwork net = kacdp::init_network(widths, grid, degree, seed);
  std::mt19937_64 rng(seed * 7 + 3);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> p = net.parameters();
  for (double& v : p) v = u(rng);
  net.set_parameters(p);
  return net;
}

}  // namespace toy
