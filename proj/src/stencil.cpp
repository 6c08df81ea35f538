#include "krf/stencil.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace krf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MetricDegenerate: return "MetricDegenerate";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridNotUniform: return "GridNotUniform";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::BoundaryNode: return "BoundaryNode";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::TrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::NormalizationViolated: return "NormalizationViolated";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ChainDomainExceeded: return "ChainDomainExceeded";
    case ErrorKind::PullbackFailure: return "PullbackFailure";
    case ErrorKind::NoAdmissiblePoints: return "NoAdmissiblePoints";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

std::vector<std::vector<Real>> fornberg_weights(Real x0, std::span<const Real> nodes,
                                                int max_order) {
  const std::size_t n = nodes.size();
  const std::size_t m = static_cast<std::size_t>(max_order);
  std::vector<std::vector<Real>> c(m + 1, std::vector<Real>(n, 0.0L));
  Real c1 = 1.0L;
  Real c4 = nodes[0] - x0;
  c[0][0] = 1.0L;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    Real c2 = 1.0L;
    const Real c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const Real c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[k][i] = c1 * (static_cast<Real>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - static_cast<Real>(k) * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

// Weights on integer offsets s_j for the derivative of order `order` at 0,
// exact on 1, s, ..., s^{p-2} and on e^{h s}. Starting from the polynomial
// (Fornberg) weights, which are exact up to s^{p-1}, we trade exactness on
// s^{p-1} for the exponential by adding a multiple of the divided-difference
// functional v (which annihilates degrees below p-1). The exponential enters
// through its Taylor remainder psi(s) = sum_{k >= p-1} h^{k-p+1} s^k / k!, so
// every quantity stays O(1) and no linear system is solved.
std::vector<Real> fitted_weights(const std::vector<Real>& offsets, Real h, int order) {
  const std::size_t p = offsets.size();
  const auto poly = fornberg_weights(0.0L, offsets, order)[static_cast<std::size_t>(order)];
  std::vector<Real> divided(p), psi(p);
  for (std::size_t j = 0; j < p; ++j) {
    Real denom = 1.0L;
    for (std::size_t k = 0; k < p; ++k) {
      if (k != j) denom *= offsets[j] - offsets[k];
    }
    divided[j] = 1.0L / denom;
    const Real sj = offsets[j];
    Real term = 1.0L;
    for (std::size_t k = 1; k < p; ++k) term *= sj / static_cast<Real>(k);
    Real remainder = 0.0L;
    for (std::size_t k = p - 1; k < p + 200; ++k) {
      remainder += term;
      term *= h * sj / static_cast<Real>(k + 1);
      if (std::fabs(term) <= 1e-22L * std::fabs(remainder)) break;
    }
    psi[j] = remainder;
  }
  Real poly_psi = 0.0L, divided_psi = 0.0L;
  for (std::size_t j = 0; j < p; ++j) {
    poly_psi += poly[j] * psi[j];
    divided_psi += divided[j] * psi[j];
  }
  const Real c = poly_psi / divided_psi;
  std::vector<Real> w(p);
  for (std::size_t j = 0; j < p; ++j) w[j] = poly[j] - c * divided[j];
  return w;
}

}  // namespace

DiffOps::DiffOps(std::size_t size, Real spacing) : size_(size), spacing_(spacing) {
  assert(size >= kBoundaryWidth);
  d1_rows_.resize(size);
  d2_rows_.resize(size);
  std::vector<Real> offsets;
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t first = 0;
    std::size_t count = 2 * kHalfWidth + 1;
    if (i < kHalfWidth) {
      first = 0;
      count = kBoundaryWidth;
    } else if (i + kHalfWidth >= size) {
      first = size - kBoundaryWidth;
      count = kBoundaryWidth;
    } else {
      first = i - kHalfWidth;
    }
    offsets.assign(count, 0.0L);
    for (std::size_t k = 0; k < count; ++k) {
      offsets[k] = static_cast<Real>(first + k) - static_cast<Real>(i);
    }
    const auto w1 = fitted_weights(offsets, spacing, 1);
    const auto w2 = fitted_weights(offsets, spacing, 2);
    d1_rows_[i].first = first;
    d2_rows_[i].first = first;
    d1_rows_[i].weights.resize(count);
    d2_rows_[i].weights.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      d1_rows_[i].weights[k] = w1[k] / spacing;
      d2_rows_[i].weights[k] = w2[k] / (spacing * spacing);
    }
  }
}

std::vector<Real> DiffOps::apply(const std::vector<StencilRow>& rows,
                                 std::span<const Real> values) const {
  assert(values.size() == size_);
  std::vector<Real> out(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto& row = rows[i];
    Real acc = 0.0L;
    for (std::size_t k = 0; k < row.weights.size(); ++k) {
      acc += row.weights[k] * values[row.first + k];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<Real> DiffOps::d1(std::span<const Real> values) const {
  return apply(d1_rows_, values);
}

std::vector<Real> DiffOps::d2(std::span<const Real> values) const {
  return apply(d2_rows_, values);
}

std::vector<Real> d1_second_order(std::span<const Real> v, Real h) {
  const std::size_t m = v.size();
  std::vector<Real> out(m);
  for (std::size_t i = 1; i + 1 < m; ++i) out[i] = (v[i + 1] - v[i - 1]) / (2 * h);
  out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
  out[m - 1] = (3 * v[m - 1] - 4 * v[m - 2] + v[m - 3]) / (2 * h);
  return out;
}

std::vector<Real> d2_second_order(std::span<const Real> v, Real h) {
  const std::size_t m = v.size();
  std::vector<Real> out(m);
  for (std::size_t i = 1; i + 1 < m; ++i) out[i] = (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h);
  out[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / (h * h);
  out[m - 1] = (2 * v[m - 1] - 5 * v[m - 2] + 4 * v[m - 3] - v[m - 4]) / (h * h);
  return out;
}

namespace {

// Cell integral over [i, i+1] from the cubic through four neighbouring nodes.
template <typename F>
void for_each_cell(std::size_t m, Real h, F&& emit) {
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (m < 4) {
      emit(i, i, std::vector<Real>{h / 2, h / 2});
    } else if (i == 0) {
      emit(i, 0, std::vector<Real>{9 * h / 24, 19 * h / 24, -5 * h / 24, h / 24});
    } else if (i + 2 >= m) {
      emit(i, m - 4, std::vector<Real>{h / 24, -5 * h / 24, 19 * h / 24, 9 * h / 24});
    } else {
      emit(i, i - 1, std::vector<Real>{-h / 24, 13 * h / 24, 13 * h / 24, -h / 24});
    }
  }
}

}  // namespace

std::vector<Real> cumulative_integral(std::span<const Real> v, Real h) {
  std::vector<Real> out(v.size(), 0.0L);
  Real acc = 0.0L;
  for_each_cell(v.size(), h, [&](std::size_t cell, std::size_t first, const std::vector<Real>& w) {
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * v[first + k];
    out[cell + 1] = acc;
  });
  return out;
}

std::vector<Real> quadrature_weights(std::size_t m, Real h) {
  std::vector<Real> out(m, 0.0L);
  for_each_cell(m, h, [&](std::size_t, std::size_t first, const std::vector<Real>& w) {
    for (std::size_t k = 0; k < w.size(); ++k) out[first + k] += w[k];
  });
  return out;
}

Real integrate(std::span<const Real> v, Real h) {
  const auto w = quadrature_weights(v.size(), h);
  Real acc = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i];
  return acc;
}

Real interpolate(std::span<const Real> values, Real x0, Real h, Real x, std::size_t points) {
  const std::size_t m = values.size();
  points = std::min(points, m);
  const Real pos = (x - x0) / h;
  long start = static_cast<long>(std::floor(pos)) - static_cast<long>(points / 2) + 1;
  start = std::clamp(start, 0L, static_cast<long>(m - points));
  Real acc = 0.0L;
  for (std::size_t k = 0; k < points; ++k) {
    Real basis = 1.0L;
    const Real xk = static_cast<Real>(start) + static_cast<Real>(k);
    for (std::size_t j = 0; j < points; ++j) {
      if (j == k) continue;
      const Real xj = static_cast<Real>(start) + static_cast<Real>(j);
      basis *= (pos - xj) / (xk - xj);
    }
    acc += basis * values[static_cast<std::size_t>(start) + k];
  }
  return acc;
}

}  // namespace krf
