#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kacdp {

// Largest supported spline degree; bounds the fixed-size scratch used by the
// local basis routines.
inline constexpr int kMaxDegree = 15;

/// Uniform knot sequence: `interior_count` equal intervals over
/// [range_min, range_max], extended by `degree` knots of the same spacing on
/// each side, giving interior_count + 2*degree + 1 knots in total.
struct KnotVector {
  std::vector<double> knots;
  int degree = 0;
  int interior_count = 0;
  double range_min = -1.0;
  double range_max = 1.0;

  /// Number of B-spline basis functions, interior_count + degree.
  std::size_t basis_count() const noexcept {
    return static_cast<std::size_t>(interior_count + degree);
  }
  double spacing() const noexcept { return (range_max - range_min) / interior_count; }
  double clamp(double x) const noexcept;
  bool strictly_inside(double x) const noexcept { return x > range_min && x < range_max; }

  friend bool operator==(const KnotVector&, const KnotVector&) = default;
};

/// Coefficients c_i of spline(x) = sum_i c_i B_i(x).
struct SplineParams {
  std::vector<double> coefficients;

  friend bool operator==(const SplineParams&, const SplineParams&) = default;
};

KnotVector make_knot_vector(double range_min, double range_max, int grid_count, int degree);

/// All basis values B_i(x), i = 0 .. G+k-1. Inputs outside the nominal range
/// are clamped to it first.
std::vector<double> basis_values(const KnotVector& knots, double x);

/// dB_i/dx for all i. Zero outside the nominal range, where the clamped
/// basis is constant. Throws unsupported-degree for degree 0.
std::vector<double> basis_derivatives(const KnotVector& knots, double x);

double eval_spline(const SplineParams& params, const KnotVector& knots, double x);

// Local evaluation used by the hot loops. Only the degree+1 functions that can
// be nonzero at x are produced; the return value is the index of the first of
// them, so values[j] == B_{first + j}(x).
std::size_t local_basis(const KnotVector& knots, double x, std::span<double> values);

// Same as local_basis and additionally fills derivs[j] == B'_{first + j}(x).
// derivs is all zeros when x lies strictly outside the nominal range.
std::size_t local_basis_with_derivatives(const KnotVector& knots, double x,
                                         std::span<double> values, std::span<double> derivs);

}  // namespace kacdp
