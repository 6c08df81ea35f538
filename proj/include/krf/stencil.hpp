#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "krf/types.hpp"

namespace krf {

/// Finite-difference weights for derivatives 0..max_order at x0 over the
/// given abscissae (Fornberg's recursion). Result is indexed [order][node].
std::vector<std::vector<Real>> fornberg_weights(Real x0, std::span<const Real> nodes,
                                                int max_order);

/// One stencil row: weights applied to samples [first, first + weights.size()).
struct StencilRow {
  std::size_t first = 0;
  std::vector<Real> weights;
};

/// Sixth-order derivative operators on a uniform grid. Interior rows are
/// centered 7-point stencils; the three nodes nearest each end use one-sided
/// 8-point stencils.
class DiffOps {
 public:
  static constexpr std::size_t kHalfWidth = 3;
  static constexpr std::size_t kBoundaryWidth = 8;

  DiffOps(std::size_t size, Real spacing);

  std::size_t size() const { return size_; }
  Real spacing() const { return spacing_; }

  std::vector<Real> d1(std::span<const Real> values) const;
  std::vector<Real> d2(std::span<const Real> values) const;

  const StencilRow& d1_row(std::size_t i) const { return d1_rows_[i]; }
  const StencilRow& d2_row(std::size_t i) const { return d2_rows_[i]; }

 private:
  std::vector<Real> apply(const std::vector<StencilRow>& rows,
                          std::span<const Real> values) const;

  std::size_t size_;
  Real spacing_;
  std::vector<StencilRow> d1_rows_;
  std::vector<StencilRow> d2_rows_;
};

/// Second-order three-point operators, used for Jacobians and preconditioners.
std::vector<Real> d1_second_order(std::span<const Real> values, Real spacing);
std::vector<Real> d2_second_order(std::span<const Real> values, Real spacing);

/// Cumulative integral from the first node, fourth-order accurate.
std::vector<Real> cumulative_integral(std::span<const Real> values, Real spacing);

/// Composite integral over the whole grid, fourth-order accurate.
Real integrate(std::span<const Real> values, Real spacing);

/// Quadrature weights matching integrate(): sum_i w_i v_i.
std::vector<Real> quadrature_weights(std::size_t size, Real spacing);

/// Local Lagrange interpolation of uniformly sampled data (origin x0, step h)
/// with `points` nodes around x. Extrapolates with the end stencil.
Real interpolate(std::span<const Real> values, Real x0, Real h, Real x,
                 std::size_t points = 8);

}  // namespace krf
