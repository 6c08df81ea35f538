#include "krf/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace krf {

namespace {

// (a, w, f, phi, phi_x) packed side by side.
struct ChainState {
  std::vector<Real> a, w, f, phi, phi_x;
};

ChainState axpy(const ChainState& x, Real c, const ChainState& k) {
  ChainState out = x;
  auto add = [c](std::vector<Real>& v, const std::vector<Real>& d) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * d[i];
  };
  add(out.a, k.a);
  add(out.w, k.w);
  add(out.f, k.f);
  add(out.phi, k.phi);
  add(out.phi_x, k.phi_x);
  return out;
}

WarpedSurfaceState as_surface(const WarpedSurfaceState& shape, const ChainState& c) {
  WarpedSurfaceState s = shape;
  s.a = c.a;
  s.w = c.w;
  return s;
}

ChainState rhs(const WarpedSurfaceState& shape, const ChainState& c, Real inv_tau) {
  const auto s = as_surface(shape, c);
  const auto k = gauss_curvature(s);
  const auto hess = surface_hessian(s, c.f);
  const auto lap = surface_laplacian(s, c.f);
  const auto fx = surface_d1(s, c.f, Parity::Even);
  const auto wx = surface_d1(s, c.w, Parity::Odd);
  const std::size_t m = s.size();
  ChainState d{std::vector<Real>(m), std::vector<Real>(m), std::vector<Real>(m),
               std::vector<Real>(m), std::vector<Real>(m)};
  // DeTurck field Y = a_x / (2 a^2): adding L_Y g gives a its own diffusion
  // and removes the neutral reparametrization mode. The pullback below flows
  // by grad f - Y, so g-bar is unaffected.
  const auto ax = surface_d1(s, c.a, Parity::Even);
  std::vector<Real> y(m), vel(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = ax[i] / (2.0L * c.a[i] * c.a[i]);
  // Y_x with a_xx from the second-derivative stencil, which (unlike D1 D1)
  // damps the grid-scale mode.
  const auto axx = surface_d2(s, c.a, Parity::Even);
  std::vector<Real> yx(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Real a = c.a[i];
    yx[i] = axx[i] / (2.0L * a * a) - ax[i] * ax[i] / (a * a * a);
  }
  for (std::size_t i = 0; i < m; ++i) {
    d.a[i] = -2.0L * (k[i] * c.a[i] + hess.xx[i]) + c.a[i] * inv_tau + y[i] * ax[i] +
             2.0L * c.a[i] * yx[i];
    d.w[i] = -k[i] * c.w[i] - wx[i] * fx[i] / c.a[i] + 0.5L * c.w[i] * inv_tau + y[i] * wx[i];
    d.f[i] = -lap[i] - 2.0L * k[i] + inv_tau + y[i] * fx[i];
    vel[i] = fx[i] / c.a[i] - y[i];
  }
  // Vector fields are odd across poles and mirrors.
  const auto vel_x = surface_d1(s, vel, Parity::Odd);
  for (std::size_t i = 0; i < m; ++i) {
    const Real lo = s.x0, hi = s.x0 + s.length();
    if (!(c.phi[i] >= lo && c.phi[i] <= hi)) {
      throw Error(ErrorKind::PullbackFailure,
                  "gradient flow map leaves the surface at cell " + std::to_string(i));
    }
    d.phi[i] = surface_sample(s, vel, Parity::Odd, c.phi[i]);
    d.phi_x[i] = surface_sample(s, vel_x, Parity::Even, c.phi[i]) * c.phi_x[i];
  }
  return d;
}

// Least-squares projection of f onto cos(j pi (x - x0) / L), j < modes. On
// cell centers these modes are exactly orthogonal (DCT-II).
void project_potential(std::vector<Real>& f, std::size_t modes) {
  const std::size_t m = f.size();
  const Real pi = std::numbers::pi_v<Real>;
  std::vector<Real> out(m, 0.0L);
  for (std::size_t j = 0; j < std::min(modes, m); ++j) {
    Real dot = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      dot += f[i] * std::cos(pi * static_cast<Real>(j) * (static_cast<Real>(i) + 0.5L) /
                             static_cast<Real>(m));
    }
    const Real coef = dot / (j == 0 ? static_cast<Real>(m) : static_cast<Real>(m) / 2.0L);
    for (std::size_t i = 0; i < m; ++i) {
      out[i] += coef * std::cos(pi * static_cast<Real>(j) * (static_cast<Real>(i) + 0.5L) /
                                static_cast<Real>(m));
    }
  }
  f = std::move(out);
}

void rk4(const WarpedSurfaceState& shape, ChainState& c, Real dt, Real inv_tau) {
  const auto k1 = rhs(shape, c, inv_tau);
  const auto k2 = rhs(shape, axpy(c, dt / 2.0L, k1), inv_tau);
  const auto k3 = rhs(shape, axpy(c, dt / 2.0L, k2), inv_tau);
  const auto k4 = rhs(shape, axpy(c, dt, k3), inv_tau);
  for (const auto* k : {&k1, &k4}) c = axpy(c, dt / 6.0L, *k);
  for (const auto* k : {&k2, &k3}) c = axpy(c, dt / 3.0L, *k);
}

Real max_of(const std::vector<Real>& v) {
  Real out = 0.0L;
  for (Real x : v) out = std::max(out, x);
  return out;
}

// sup over cells of max(|T_xx| / a, |T_tt| / w^2) for the diagonal tensor T.
Real tensor_sup(const WarpedSurfaceState& g, const std::vector<Real>& txx,
                const std::vector<Real>& ttt) {
  Real out = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out = std::max({out, std::fabs(txx[i]) / g.a[i], std::fabs(ttt[i]) / (g.w[i] * g.w[i])});
  }
  return out;
}

}  // namespace

Real ChainReport::max_bar() const { return max_of(bar_residual); }
Real ChainReport::max_check() const { return max_of(check_residual); }
Real ChainReport::max_potential() const { return max_of(potential_residual); }
Real ChainReport::max_w_defect() const { return max_of(w_defect); }

ChainReport modified_flow_chain(const WarpedSurfaceState& initial, const ScalarField& f0,
                                const ChainControls& controls) {
  const Real tau = controls.tau;
  if (!(tau > 0.0L)) throw Error(ErrorKind::ConfigInvalid, "tau must be positive");
  if (!(controls.s_end < tau)) {
    throw Error(ErrorKind::ChainDomainExceeded, "s_end must stay below tau (C(s) > 0)");
  }
  if (controls.samples < 2) throw Error(ErrorKind::ConfigInvalid, "chain needs at least 2 samples");
  if (f0.size() != initial.size()) throw Error(ErrorKind::GridMismatch, "potential length mismatch");
  const bool finite_tau = std::isfinite(tau);
  const Real inv_tau = finite_tau ? 1.0L / tau : 0.0L;
  const std::size_t m = initial.size();

  ChainReport rep;
  rep.tau = tau;
  rep.h = initial.h;
  rep.ds = controls.s_end / static_cast<Real>(controls.samples);
  auto time_of = [&](Real s) { return finite_tau ? -tau * std::log1p(-s / tau) : s; };
  auto scale_of = [&](Real s) { return finite_tau ? 1.0L - s / tau : 1.0L; };

  ChainState c{initial.a, initial.w, f0, std::vector<Real>(m), std::vector<Real>(m, 1.0L)};
  for (std::size_t i = 0; i < m; ++i) c.phi[i] = initial.x(i);
  project_potential(c.f, controls.potential_modes);

  std::vector<WarpedSurfaceState> bar;
  for (std::size_t k = 0; k <= controls.samples; ++k) {
    const Real s = rep.ds * static_cast<Real>(k);
    const Real t = time_of(s);
    if (k > 0) {
      const Real t_prev = rep.t.back();
      const Real min_a = *std::min_element(c.a.begin(), c.a.end());
      const Real dt_cap = controls.cfl * initial.h * initial.h * min_a;
      const auto steps = static_cast<std::size_t>(std::ceil((t - t_prev) / dt_cap));
      const Real dt = (t - t_prev) / static_cast<Real>(steps);
      for (std::size_t j = 0; j < steps; ++j) {
        rk4(initial, c, dt, inv_tau);
        project_potential(c.f, controls.potential_modes);
      }
    }
    auto g = as_surface(initial, c);
    g.time = t;
    const auto pulled = pull_back(g, c.f, c.phi, c.phi_x);
    const Real scale = scale_of(s);
    auto check = pulled.surface;
    for (std::size_t i = 0; i < m; ++i) {
      check.a[i] *= scale;
      check.w[i] *= std::sqrt(scale);
    }
    check.time = s;
    rep.s.push_back(s);
    rep.t.push_back(t);
    rep.scale.push_back(scale);
    rep.w_defect.push_back(finite_tau ? std::fabs(surface_w_functional(pulled.surface, pulled.f, tau) -
                                                  surface_w_functional(g, c.f, tau))
                                      : 0.0L);
    bar.push_back(pulled.surface);
    rep.checked.push_back(std::move(check));
    rep.checked_potential.push_back(pulled.f);
  }

  const std::size_t n = rep.s.size();
  rep.bar_residual.assign(n, 0.0L);
  rep.check_residual.assign(n, 0.0L);
  rep.potential_residual.assign(n, 0.0L);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const std::vector<Real> times = {rep.t[k - 1], rep.t[k], rep.t[k + 1]};
    const auto wt = fornberg_weights(rep.t[k], times, 1)[1];
    const auto& gb = bar[k];
    const auto kb = gauss_curvature(gb);
    std::vector<Real> txx(m), ttt(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Real da = wt[0] * bar[k - 1].a[i] + wt[1] * gb.a[i] + wt[2] * bar[k + 1].a[i];
      auto sq = [i](const WarpedSurfaceState& g) { return g.w[i] * g.w[i]; };
      const Real dw2 = wt[0] * sq(bar[k - 1]) + wt[1] * sq(gb) + wt[2] * sq(bar[k + 1]);
      txx[i] = da + 2.0L * (kb[i] * gb.a[i] - gb.a[i] * inv_tau / 2.0L);
      ttt[i] = dw2 + 2.0L * (kb[i] * sq(gb) - sq(gb) * inv_tau / 2.0L);
    }
    rep.bar_residual[k] = tensor_sup(gb, txx, ttt);

    const auto& gc = rep.checked[k];
    const auto kc = gauss_curvature(gc);
    const auto& fc = rep.checked_potential[k];
    const auto lap = surface_laplacian(gc, fc);
    const auto grad = surface_grad_norm_sq(gc, fc);
    Real pot = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& prev = rep.checked[k - 1];
      const auto& next = rep.checked[k + 1];
      const Real two_ds = 2.0L * rep.ds;
      txx[i] = (next.a[i] - prev.a[i]) / two_ds + 2.0L * kc[i] * gc.a[i];
      ttt[i] = (next.w[i] * next.w[i] - prev.w[i] * prev.w[i]) / two_ds +
               2.0L * kc[i] * gc.w[i] * gc.w[i];
      const Real fs = (rep.checked_potential[k + 1][i] - rep.checked_potential[k - 1][i]) / two_ds;
      pot = std::max(pot, std::fabs(fs + lap[i] - grad[i] + 2.0L * kc[i] -
                                    inv_tau / rep.scale[k]));
    }
    rep.check_residual[k] = tensor_sup(gc, txx, ttt);
    rep.potential_residual[k] = pot;
  }
  return rep;
}

}  // namespace krf
