#include "kacdp/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "kacdp/error.hpp"

namespace kacdp {

namespace {

using Scratch = std::array<double, kMaxDegree + 2>;

// Index s of the knot interval [t_s, t_{s+1}) holding the (already clamped)
// point. The right endpoint of the range belongs to the last interval.
std::size_t find_span(const KnotVector& kv, double xc) {
  const int p = kv.degree;
  const int lo = p;
  const int hi = p + kv.interior_count - 1;
  int s = p + static_cast<int>(std::floor((xc - kv.range_min) / kv.spacing()));
  s = std::clamp(s, lo, hi);
  const auto& t = kv.knots;
  while (s > lo && xc < t[static_cast<std::size_t>(s)]) --s;
  while (s < hi && xc >= t[static_cast<std::size_t>(s) + 1]) ++s;
  return static_cast<std::size_t>(s);
}

// Triangular Cox-de Boor evaluation of the nonzero basis functions of degree
// `degree` on `span`. When `lower` is given it receives the degree-1 row.
void triangle(const std::vector<double>& t, std::size_t span, int degree, double x,
              double* out, double* lower) {
  Scratch left{};
  Scratch right{};
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    if (lower != nullptr && j == degree) {
      std::copy(out, out + degree, lower);
    }
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
  if (lower != nullptr && degree == 0) lower[0] = 0.0;
}

}  // namespace

double KnotVector::clamp(double x) const noexcept {
  return std::clamp(x, range_min, range_max);
}

KnotVector make_knot_vector(double range_min, double range_max, int grid_count, int degree) {
  if (!(range_min < range_max)) {
    throw Error(ErrorKind::invalid_range, "range_min must be below range_max");
  }
  if (grid_count < 1) {
    throw Error(ErrorKind::invalid_grid, "grid_count must be at least 1, got " + std::to_string(grid_count));
  }
  if (degree < 0 || degree > kMaxDegree) {
    throw Error(ErrorKind::unsupported_degree,
                "degree must lie in [0, " + std::to_string(kMaxDegree) + "], got " + std::to_string(degree));
  }
  KnotVector kv;
  kv.degree = degree;
  kv.interior_count = grid_count;
  kv.range_min = range_min;
  kv.range_max = range_max;
  const int total = grid_count + 2 * degree + 1;
  kv.knots.resize(static_cast<std::size_t>(total));
  const double width = range_max - range_min;
  for (int i = 0; i < total; ++i) {
    kv.knots[static_cast<std::size_t>(i)] =
        range_min + width * static_cast<double>(i - degree) / static_cast<double>(grid_count);
  }
  return kv;
}

std::size_t local_basis(const KnotVector& kv, double x, std::span<double> values) {
  const double xc = kv.clamp(x);
  const std::size_t span = find_span(kv, xc);
  triangle(kv.knots, span, kv.degree, xc, values.data(), nullptr);
  return span - static_cast<std::size_t>(kv.degree);
}

std::size_t local_basis_with_derivatives(const KnotVector& kv, double x,
                                         std::span<double> values, std::span<double> derivs) {
  const int p = kv.degree;
  if (p == 0) {
    throw Error(ErrorKind::unsupported_degree, "basis derivatives need degree >= 1");
  }
  const double xc = kv.clamp(x);
  const std::size_t span = find_span(kv, xc);
  Scratch lower{};
  triangle(kv.knots, span, p, xc, values.data(), lower.data());
  const std::size_t first = span - static_cast<std::size_t>(p);
  if (x != xc) {
    std::fill(derivs.begin(), derivs.begin() + p + 1, 0.0);
    return first;
  }
  // B'_{i,p} = p * (B_{i,p-1} / (t_{i+p} - t_i) - B_{i+1,p-1} / (t_{i+p+1} - t_{i+1}))
  // where lower[j] holds B_{first+1+j, p-1}.
  const auto& t = kv.knots;
  const double deg = static_cast<double>(p);
  for (int j = 0; j <= p; ++j) {
    const std::size_t i = first + static_cast<std::size_t>(j);
    double d = 0.0;
    if (j >= 1) {
      const double den = t[i + p] - t[i];
      if (den != 0.0) d += lower[j - 1] / den;
    }
    if (j < p) {
      const double den = t[i + p + 1] - t[i + 1];
      if (den != 0.0) d -= lower[j] / den;
    }
    derivs[static_cast<std::size_t>(j)] = deg * d;
  }
  return first;
}

std::vector<double> basis_values(const KnotVector& kv, double x) {
  std::vector<double> out(kv.basis_count(), 0.0);
  Scratch local{};
  const std::size_t first = local_basis(kv, x, local);
  for (int j = 0; j <= kv.degree; ++j) out[first + static_cast<std::size_t>(j)] = local[j];
  return out;
}

std::vector<double> basis_derivatives(const KnotVector& kv, double x) {
  std::vector<double> out(kv.basis_count(), 0.0);
  Scratch values{};
  Scratch derivs{};
  const std::size_t first = local_basis_with_derivatives(kv, x, values, derivs);
  for (int j = 0; j <= kv.degree; ++j) out[first + static_cast<std::size_t>(j)] = derivs[j];
  return out;
}

double eval_spline(const SplineParams& params, const KnotVector& kv, double x) {
  if (params.coefficients.size() != kv.basis_count()) {
    throw Error(ErrorKind::length_mismatch,
                "spline has " + std::to_string(params.coefficients.size()) + " coefficients, knots expect " +
                    std::to_string(kv.basis_count()));
  }
  Scratch local{};
  const std::size_t first = local_basis(kv, x, local);
  double sum = 0.0;
  for (int j = 0; j <= kv.degree; ++j) {
    sum += params.coefficients[first + static_cast<std::size_t>(j)] * local[j];
  }
  return sum;
}

}  // namespace kacdp
