#include "krf/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace krf {

namespace {

constexpr std::size_t kGhosts = 8;  // reflection ghosts available at Pole/Mirror ends
constexpr std::size_t kOpenGhosts = 3;
constexpr std::size_t kEndPoints = 10;
constexpr Real kPi = std::numbers::pi_v<Real>;

constexpr Real kD1[7] = {-1.0L, 9.0L, -45.0L, 0.0L, 45.0L, -9.0L, 1.0L};
constexpr Real kD2[7] = {2.0L, -27.0L, 270.0L, -490.0L, 270.0L, -27.0L, 2.0L};

bool reflects(SurfaceEnd e) { return e != SurfaceEnd::Open; }

Real sign_at(SurfaceEnd e, Parity p) {
  return (e == SurfaceEnd::Pole && p == Parity::Odd) ? -1.0L : 1.0L;
}

// Degree-7 extrapolation to the node at offset -k (k >= 1) from nodes 0..7.
Real extrapolate(const std::vector<Real>& v, std::size_t first, int dir, std::size_t k) {
  Real acc = 0.0L;
  const Real target = -static_cast<Real>(k);
  for (int j = 0; j < 8; ++j) {
    Real basis = 1.0L;
    for (int l = 0; l < 8; ++l) {
      if (l != j) basis *= (target - l) / static_cast<Real>(j - l);
    }
    acc += basis * v[static_cast<std::size_t>(static_cast<long>(first) + dir * j)];
  }
  return acc;
}

/// Field continued past both ends. Index i of the field maps to i + lo.
struct Extended {
  std::vector<Real> values;
  std::size_t lo = 0;
  Real at(long i) const { return values[static_cast<std::size_t>(i + static_cast<long>(lo))]; }
};

Extended extend(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p) {
  const std::size_t m = v.size();
  if (m != s.size()) throw Error(ErrorKind::GridMismatch, "surface field length mismatch");
  const std::size_t lo = reflects(s.left) ? std::min(kGhosts, m) : kOpenGhosts;
  const std::size_t hi = reflects(s.right) ? std::min(kGhosts, m) : kOpenGhosts;
  Extended e;
  e.lo = lo;
  e.values.resize(m + lo + hi);
  std::copy(v.begin(), v.end(), e.values.begin() + static_cast<long>(lo));
  const Real sl = sign_at(s.left, p), sr = sign_at(s.right, p);
  for (std::size_t k = 1; k <= lo; ++k) {
    e.values[lo - k] = reflects(s.left) ? sl * v[k - 1] : extrapolate(v, 0, 1, k);
  }
  for (std::size_t k = 1; k <= hi; ++k) {
    e.values[lo + m - 1 + k] = reflects(s.right) ? sr * v[m - k] : extrapolate(v, m - 1, -1, k);
  }
  return e;
}

std::vector<Real> apply_centered(const WarpedSurfaceState& s, const std::vector<Real>& v,
                                 Parity p, const Real (&w)[7], Real scale) {
  const auto e = extend(s, v, p);
  std::vector<Real> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Real acc = 0.0L;
    for (int k = -3; k <= 3; ++k) acc += w[k + 3] * e.at(static_cast<long>(i) + k);
    out[i] = acc / scale;
  }
  return out;
}

/// Derivatives 1, 3, 5 of the continued field at an end face.
std::array<Real, 3> face_derivatives(const WarpedSurfaceState& s, const Extended& e, bool left) {
  const std::size_t m = s.size();
  const SurfaceEnd end = left ? s.left : s.right;
  const Real face = left ? s.x0 : s.x0 + s.length();
  std::vector<Real> nodes, vals;
  if (reflects(end)) {
    const long half = static_cast<long>(kEndPoints / 2);
    const long base = left ? 0 : static_cast<long>(m);
    for (long k = -half; k < half; ++k) {
      nodes.push_back(s.x0 + (static_cast<Real>(base + k) + 0.5L) * s.h);
      vals.push_back(e.at(base + k));
    }
  } else {
    for (std::size_t k = 0; k < kEndPoints; ++k) {
      const std::size_t i = left ? k : m - 1 - k;
      nodes.push_back(s.x(i));
      vals.push_back(e.at(static_cast<long>(i)));
    }
  }
  const auto w = fornberg_weights(face, nodes, 5);
  std::array<Real, 3> out{};
  for (int d = 0; d < 3; ++d) {
    Real acc = 0.0L;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += w[2 * d + 1][k] * vals[k];
    out[d] = acc;
  }
  return out;
}

Real face_value(const WarpedSurfaceState& s, const Extended& e, bool left, int order) {
  const std::size_t m = s.size();
  const Real face = left ? s.x0 : s.x0 + s.length();
  std::vector<Real> nodes, vals;
  const long half = static_cast<long>(kEndPoints / 2);
  const long base = left ? 0 : static_cast<long>(m);
  for (long k = -half; k < half; ++k) {
    nodes.push_back(s.x0 + (static_cast<Real>(base + k) + 0.5L) * s.h);
    vals.push_back(e.at(base + k));
  }
  const auto w = fornberg_weights(face, nodes, order);
  Real acc = 0.0L;
  for (std::size_t k = 0; k < nodes.size(); ++k) acc += w[order][k] * vals[k];
  return acc;
}

void check_pole(const WarpedSurfaceState& s, bool left) {
  const auto ew = extend(s, s.w, Parity::Odd);
  const auto ea = extend(s, s.a, Parity::Even);
  const Real slope = face_value(s, ew, left, 1) / std::sqrt(face_value(s, ea, left, 0));
  const Real ds = left ? slope : -slope;
  if (!(std::fabs(ds - 1.0L) < 1e-5L)) {
    throw Error(ErrorKind::MetricDegenerate,
                std::string(left ? "left" : "right") + " pole does not close smoothly (dw/ds = " +
                    std::to_string(static_cast<double>(ds)) + ")");
  }
}

}  // namespace

WarpedSurfaceState make_surface(Real x0, Real h, std::vector<Real> a, std::vector<Real> w,
                                SurfaceEnd left, SurfaceEnd right, Real time) {
  if (a.size() != w.size()) throw Error(ErrorKind::GridMismatch, "a and w differ in length");
  if (w.size() < kMinGridSize) throw Error(ErrorKind::GridTooCoarse, "surface needs at least 16 cells");
  if (!(h > 0.0L)) throw Error(ErrorKind::GridNotUniform, "surface spacing must be positive");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(a[i] > 0.0L) || !(w[i] > 0.0L)) {
      throw Error(ErrorKind::MetricDegenerate, "a and w must be positive at cell " + std::to_string(i));
    }
  }
  WarpedSurfaceState s{x0, h, std::move(a), std::move(w), left, right, time};
  if (left == SurfaceEnd::Pole) check_pole(s, true);
  if (right == SurfaceEnd::Pole) check_pole(s, false);
  return s;
}

WarpedSurfaceState round_sphere_surface(Real radius, std::size_t m) {
  const Real h = kPi * radius / static_cast<Real>(m);
  std::vector<Real> a(m, 1.0L), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = radius * std::sin((static_cast<Real>(i) + 0.5L) * h / radius);
  }
  return make_surface(0.0L, h, std::move(a), std::move(w), SurfaceEnd::Pole, SurfaceEnd::Pole);
}

WarpedSurfaceState flat_cylinder_surface(Real warp, Real length, std::size_t m) {
  return make_surface(0.0L, length / static_cast<Real>(m), std::vector<Real>(m, 1.0L),
                      std::vector<Real>(m, warp), SurfaceEnd::Mirror, SurfaceEnd::Mirror);
}

WarpedSurfaceState flat_disk_surface(Real length, std::size_t m) {
  const Real h = length / static_cast<Real>(m);
  std::vector<Real> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = (static_cast<Real>(i) + 0.5L) * h;
  return make_surface(0.0L, h, std::vector<Real>(m, 1.0L), std::move(w), SurfaceEnd::Pole,
                      SurfaceEnd::Open);
}

WarpedSurfaceState surface_from_kahler(const RadialKahlerState& state) {
  if (state.dimension() != 1) {
    throw Error(ErrorKind::ConfigInvalid, "surface view needs a one-dimensional Kahler state");
  }
  const auto& ddp = state.ddpotential();
  std::vector<Real> a(ddp.size()), w(ddp.size());
  for (std::size_t i = 0; i < ddp.size(); ++i) {
    a[i] = ddp[i] / 2.0L;
    w[i] = std::sqrt(2.0L * ddp[i]);
  }
  const Real h = state.grid().spacing;
  return make_surface(state.grid().start - h / 2.0L, h, std::move(a), std::move(w),
                      SurfaceEnd::Open, SurfaceEnd::Open, state.time());
}

std::vector<Real> surface_d1(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p) {
  return apply_centered(s, v, p, kD1, 60.0L * s.h);
}

std::vector<Real> surface_d2(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p) {
  return apply_centered(s, v, p, kD2, 180.0L * s.h * s.h);
}

Real surface_integral(const WarpedSurfaceState& s, const std::vector<Real>& values, Parity p) {
  const auto e = extend(s, values, p);
  Real mid = 0.0L;
  for (Real v : values) mid += v;
  mid *= s.h;
  const auto l = face_derivatives(s, e, true);
  const auto r = face_derivatives(s, e, false);
  const Real h2 = s.h * s.h;
  return mid + h2 / 24.0L * (r[0] - l[0]) - 7.0L * h2 * h2 / 5760.0L * (r[1] - l[1]) +
         31.0L * h2 * h2 * h2 / 967680.0L * (r[2] - l[2]);
}

Real surface_sample(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p, Real x) {
  const auto e = extend(s, v, p);
  // Ghost j of the extended array sits at x0 + (j - lo + 1/2) h.
  const Real origin = s.x0 + (0.5L - static_cast<Real>(e.lo)) * s.h;
  return interpolate(e.values, origin, s.h, x, 8);
}

ScalarField gauss_curvature(const WarpedSurfaceState& s) {
  const auto wx = surface_d1(s, s.w, Parity::Odd);
  const auto wxx = surface_d2(s, s.w, Parity::Odd);
  const auto ax = surface_d1(s, s.a, Parity::Even);
  ScalarField k(s.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const Real a = s.a[i];
    k[i] = -(wxx[i] / a - wx[i] * ax[i] / (2.0L * a * a)) / s.w[i];
  }
  return k;
}

ScalarField surface_grad_norm_sq(const WarpedSurfaceState& s, const ScalarField& f) {
  const auto fx = surface_d1(s, f, Parity::Even);
  ScalarField out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fx[i] * fx[i] / s.a[i];
  return out;
}

SurfaceTensor surface_hessian(const WarpedSurfaceState& s, const ScalarField& f) {
  const auto fx = surface_d1(s, f, Parity::Even);
  const auto fxx = surface_d2(s, f, Parity::Even);
  const auto ax = surface_d1(s, s.a, Parity::Even);
  const auto wx = surface_d1(s, s.w, Parity::Odd);
  SurfaceTensor hess{ScalarField(f.size()), ScalarField(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    hess.xx[i] = fxx[i] - ax[i] / (2.0L * s.a[i]) * fx[i];
    hess.tt[i] = s.w[i] * wx[i] / s.a[i] * fx[i];
  }
  return hess;
}

ScalarField surface_laplacian(const WarpedSurfaceState& s, const ScalarField& f) {
  const auto hess = surface_hessian(s, f);
  ScalarField out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = hess.xx[i] / s.a[i] + hess.tt[i] / (s.w[i] * s.w[i]);
  }
  return out;
}

namespace {

// e^{-f} dV per unit x, including the angular factor.
ScalarField weighted_measure(const WarpedSurfaceState& s, const ScalarField& f) {
  ScalarField dm(s.size());
  for (std::size_t i = 0; i < dm.size(); ++i) {
    dm[i] = 2.0L * kPi * std::sqrt(s.a[i]) * s.w[i] * std::exp(-f[i]);
  }
  return dm;
}

Real relative_gap(Real analytic, Real fd) {
  const Real denom = std::max(std::fabs(analytic), std::fabs(fd));
  return denom == 0.0L ? 0.0L : std::fabs(analytic - fd) / denom;
}

}  // namespace

Real surface_area(const WarpedSurfaceState& s) {
  return surface_integral(s, weighted_measure(s, ScalarField(s.size(), 0.0L)), Parity::Odd);
}

Real surface_f_functional(const WarpedSurfaceState& s, const ScalarField& f) {
  const auto k = gauss_curvature(s);
  const auto g2 = surface_grad_norm_sq(s, f);
  auto dm = weighted_measure(s, f);
  for (std::size_t i = 0; i < dm.size(); ++i) dm[i] *= 2.0L * k[i] + g2[i];
  return surface_integral(s, dm, Parity::Odd);
}

Real surface_w_functional(const WarpedSurfaceState& s, const ScalarField& f, Real tau) {
  const auto k = gauss_curvature(s);
  const auto g2 = surface_grad_norm_sq(s, f);
  auto dm = weighted_measure(s, f);
  for (std::size_t i = 0; i < dm.size(); ++i) {
    dm[i] *= tau * (2.0L * k[i] + g2[i]) + f[i] - 2.0L;
  }
  return surface_integral(s, dm, Parity::Odd) / (4.0L * kPi * tau);
}

VariationField make_variation(const WarpedSurfaceState& s, ScalarField v_xx, ScalarField v_tt) {
  if (v_xx.size() != s.size() || v_tt.size() != s.size()) {
    throw Error(ErrorKind::GridMismatch, "variation length mismatch");
  }
  ScalarField h(s.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = 0.5L * (v_xx[i] / s.a[i] + v_tt[i] / (s.w[i] * s.w[i]));
  }
  return {std::move(v_xx), std::move(v_tt), std::move(h)};
}

VariationResidual variation_residual(const WarpedSurfaceState& s, const ScalarField& f,
                                     const VariationField& v, Real tau, Real eps) {
  const auto k = gauss_curvature(s);
  const auto hess = surface_hessian(s, f);
  const auto dm = weighted_measure(s, f);
  ScalarField int_f(s.size()), int_w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real a = s.a[i], w2 = s.w[i] * s.w[i];
    const Real txx = k[i] * a + hess.xx[i], ttt = k[i] * w2 + hess.tt[i];
    int_f[i] = -(v.v_xx[i] * txx / (a * a) + v.v_tt[i] * ttt / (w2 * w2)) * dm[i];
    int_w[i] = -(v.v_xx[i] * (txx - a / (2.0L * tau)) / (a * a) +
                 v.v_tt[i] * (ttt - w2 / (2.0L * tau)) / (w2 * w2)) *
               dm[i];
  }
  VariationResidual out;
  out.analytic_f = surface_integral(s, int_f, Parity::Odd);
  out.analytic_w = tau / (4.0L * kPi * tau) * surface_integral(s, int_w, Parity::Odd);

  auto shifted = [&](Real e) {
    SurfaceWithPotential p{s, f};
    for (std::size_t i = 0; i < s.size(); ++i) {
      p.surface.a[i] = s.a[i] + e * v.v_xx[i];
      p.surface.w[i] = std::sqrt(s.w[i] * s.w[i] + e * v.v_tt[i]);
      p.f[i] = f[i] + e * v.h[i];
    }
    return p;
  };
  const auto plus = shifted(eps), minus = shifted(-eps);
  out.fd_f = (surface_f_functional(plus.surface, plus.f) -
              surface_f_functional(minus.surface, minus.f)) / (2.0L * eps);
  out.fd_w = (surface_w_functional(plus.surface, plus.f, tau) -
              surface_w_functional(minus.surface, minus.f, tau)) / (2.0L * eps);
  out.relative_f = relative_gap(out.analytic_f, out.fd_f);
  out.relative_w = relative_gap(out.analytic_w, out.fd_w);
  return out;
}

SurfaceWithPotential pull_back(const WarpedSurfaceState& s, const ScalarField& f,
                               const std::vector<Real>& phi, const std::vector<Real>& phi_x) {
  if (phi.size() != s.size() || phi_x.size() != s.size()) {
    throw Error(ErrorKind::GridMismatch, "pullback map length mismatch");
  }
  const Real lo = s.x0, hi = s.x0 + s.length();
  SurfaceWithPotential out{s, f};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(phi[i] >= lo && phi[i] <= hi) || !(phi_x[i] > 0.0L)) {
      throw Error(ErrorKind::PullbackFailure,
                  "gradient flow map leaves the surface at cell " + std::to_string(i));
    }
  }
  const auto ea = extend(s, s.a, Parity::Even);
  const auto ew = extend(s, s.w, Parity::Odd);
  const auto ef = extend(s, f, Parity::Even);
  auto sample = [&](const Extended& e, Real x) {
    const Real origin = s.x0 + (0.5L - static_cast<Real>(e.lo)) * s.h;
    return interpolate(e.values, origin, s.h, x, 8);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.surface.a[i] = sample(ea, phi[i]) * phi_x[i] * phi_x[i];
    out.surface.w[i] = sample(ew, phi[i]);
    out.f[i] = sample(ef, phi[i]);
  }
  return out;
}

}  // namespace krf
