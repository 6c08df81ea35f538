#include "krf/functionals.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "krf/curvature.hpp"
#include "krf/geometry.hpp"

namespace krf {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;
constexpr Real kNormalizationTolerance = 1e-10L;
constexpr Real kArmijo = 1e-4L;
constexpr int kMaxBacktracks = 60;

using SparseMatrix = Eigen::SparseMatrix<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

void check_length(const RadialKahlerState& state, const ScalarField& f) {
  if (f.size() != state.size()) throw Error(ErrorKind::GridMismatch, "field length mismatch");
}

// Quadrature weight times Riemannian volume per unit rho.
std::vector<Real> volume_quadrature(const RadialKahlerState& state) {
  auto q = quadrature_weights(state.size(), state.grid().spacing);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= state.volume_weight()[i];
  return q;
}

Real sum_checked(const std::vector<Real>& integrand, const std::vector<Real>& q,
                 const FunctionalOptions& options) {
  Real peak = 0.0L, acc = 0.0L;
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    peak = std::max(peak, std::fabs(integrand[i] * q[i]));
    acc += integrand[i] * q[i];
  }
  const Real tail = std::fabs(integrand.back() * q.back());
  if (!std::isfinite(acc) || tail > options.decay_threshold * peak) {
    throw Error(ErrorKind::NonIntegrable, "integrand does not decay at the far end of the grid");
  }
  return acc;
}

Real x_log_x(Real u2) { return u2 > 0.0L ? u2 * std::log(u2) : 0.0L; }

// Transpose of the first-derivative operator applied to y.
std::vector<Real> d1_transpose(const DiffOps& ops, const std::vector<Real>& y) {
  std::vector<Real> out(y.size(), 0.0L);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& row = ops.d1_row(i);
    for (std::size_t k = 0; k < row.weights.size(); ++k) out[row.first + k] += row.weights[k] * y[i];
  }
  return out;
}

// D^T diag(coef) D restricted to columns < free, plus diag(extra).
SparseMatrix dirichlet_matrix(const DiffOps& ops, const std::vector<Real>& coef,
                              const std::vector<Real>& extra, std::size_t free) {
  std::vector<Eigen::Triplet<Real>> trips;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& row = ops.d1_row(i);
    for (std::size_t a = 0; a < row.weights.size(); ++a) {
      const std::size_t ja = row.first + a;
      if (ja >= free) continue;
      for (std::size_t b = 0; b < row.weights.size(); ++b) {
        const std::size_t jb = row.first + b;
        if (jb >= free) continue;
        trips.emplace_back(static_cast<int>(ja), static_cast<int>(jb),
                           coef[i] * row.weights[a] * row.weights[b]);
      }
    }
  }
  for (std::size_t j = 0; j < free; ++j) trips.emplace_back(static_cast<int>(j), static_cast<int>(j), extra[j]);
  SparseMatrix a(static_cast<int>(free), static_cast<int>(free));
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

/// Discrete u-form W and its gradient for a fixed state and tau.
class UFormProblem {
 public:
  UFormProblem(const RadialKahlerState& state, Real tau, std::size_t cutoff)
      : state_(state), tau_(tau), cutoff_(cutoff), wq_(volume_quadrature(state)),
        r_(scalar_curvature(state)),
        c_(std::pow(4.0L * kPi * tau, -static_cast<Real>(state.dimension()))) {}

  Real value(const std::vector<Real>& u) const {
    const auto du = state_.ops().d1(u);
    const Real n = static_cast<Real>(state_.dimension());
    const auto& ddp = state_.ddpotential();
    Real acc = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Real u2 = u[i] * u[i];
      acc += wq_[i] * (2.0L * tau_ * (r_[i] * u2 + 4.0L * du[i] * du[i] / ddp[i]) - x_log_x(u2) -
                       2.0L * n * u2);
    }
    return c_ * acc;
  }

  std::vector<Real> gradient(const std::vector<Real>& u) const {
    const auto du = state_.ops().d1(u);
    const Real n = static_cast<Real>(state_.dimension());
    const auto& ddp = state_.ddpotential();
    std::vector<Real> y(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) y[i] = wq_[i] * du[i] / ddp[i];
    auto g = d1_transpose(state_.ops(), y);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const Real u2 = u[j] * u[j];
      const Real log_term = u2 > 0.0L ? 2.0L * u[j] * std::log(u2) + 2.0L * u[j] : 0.0L;
      g[j] = c_ * (16.0L * tau_ * g[j] + wq_[j] * (4.0L * tau_ * r_[j] * u[j] - log_term -
                                                   4.0L * n * u[j]));
    }
    return g;
  }

  // Gradient of the mass constraint.
  std::vector<Real> mass_gradient(const std::vector<Real>& u) const {
    std::vector<Real> g(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) g[j] = 2.0L * c_ * wq_[j] * u[j];
    return g;
  }

  SparseMatrix preconditioner(const std::vector<Real>& u) const {
    const Real n = static_cast<Real>(state_.dimension());
    const auto& ddp = state_.ddpotential();
    std::vector<Real> coef(u.size()), extra(cutoff_);
    for (std::size_t i = 0; i < u.size(); ++i) coef[i] = c_ * 16.0L * tau_ * wq_[i] / ddp[i];
    for (std::size_t j = 0; j < cutoff_; ++j) {
      const Real u2 = std::max(u[j] * u[j], std::numeric_limits<Real>::min());
      const Real curv = 4.0L * tau_ * r_[j] - 2.0L * std::log(u2) - 6.0L - 4.0L * n;
      extra[j] = c_ * wq_[j] * std::clamp(curv, 1.0L, 1e3L);
    }
    return dirichlet_matrix(state_.ops(), coef, extra, cutoff_);
  }

  void normalize(std::vector<Real>& u) const {
    Real mass = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) mass += wq_[i] * u[i] * u[i];
    mass *= c_;
    if (!(mass > 0.0L)) throw Error(ErrorKind::NormalizationViolated, "density has zero mass");
    const Real s = 1.0L / std::sqrt(mass);
    for (auto& v : u) v *= s;
  }

  std::size_t cutoff() const { return cutoff_; }

 private:
  const RadialKahlerState& state_;
  Real tau_;
  std::size_t cutoff_;
  std::vector<Real> wq_;
  ScalarField r_;
  Real c_;
};

Vector restrict_to(const std::vector<Real>& v, std::size_t free) {
  Vector out(static_cast<int>(free));
  for (std::size_t j = 0; j < free; ++j) out(static_cast<int>(j)) = v[j];
  return out;
}

MuResult descend(const UFormProblem& problem, std::vector<Real> u, const MinimizerControls& controls,
                 Real tau) {
  const std::size_t free = problem.cutoff();
  problem.normalize(u);
  MuResult res;
  Real w = problem.value(u);
  res.history.push_back(w);
  Real alpha = 1.0L;
  for (std::size_t it = 0; it < controls.max_iterations; ++it) {
    res.iterations = it;
    const Vector g = restrict_to(problem.gradient(u), free);
    const Vector nrm = restrict_to(problem.mass_gradient(u), free);
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(problem.preconditioner(u));
    if (lu.info() != Eigen::Success) break;
    const Vector ga = lu.solve(g);
    const Vector na = lu.solve(nrm);
    const Real lambda = nrm.dot(ga) / nrm.dot(na);
    const Vector dir = ga - lambda * na;
    const Real slope = g.dot(dir);
    res.gradient_norm = std::sqrt(std::max(slope, 0.0L));
    if (res.gradient_norm < controls.gradient_tolerance) {
      res.converged = true;
      break;
    }
    alpha = std::min(1.0L, 2.0L * alpha);
    bool accepted = false;
    for (int b = 0; b < kMaxBacktracks; ++b, alpha /= 2.0L) {
      std::vector<Real> trial = u;
      for (std::size_t j = 0; j < free; ++j) {
        trial[j] = std::max(0.0L, u[j] - alpha * dir(static_cast<int>(j)));
      }
      problem.normalize(trial);
      const Real wt = problem.value(trial);
      if (wt <= w - kArmijo * alpha * slope) {
        u = std::move(trial);
        w = wt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // line search stalled at round-off
    res.history.push_back(w);
  }
  res.mu = w;
  res.minimizer = TestDensity{std::move(u), tau, free};
  return res;
}

ScalarField gaussian_profile(const RadialKahlerState& state, Real variance) {
  const auto d = radial_distance(state);
  ScalarField u(d.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-d[i] * d[i] / (4.0L * variance));
  return u;
}

}  // namespace

const char* to_string(WNormalization normalization) {
  switch (normalization) {
    case WNormalization::Riemannian: return "riemannian";
    case WNormalization::Kahler: return "kahler";
    case WNormalization::UForm: return "u-form";
  }
  return "unknown";
}

Real f_functional(const RadialKahlerState& state, const ScalarField& f,
                  const FunctionalOptions& options) {
  check_length(state, f);
  const auto r = scalar_curvature(state);
  const auto g2 = grad_norm_sq(state, f);
  std::vector<Real> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    integrand[i] = (2.0L * r[i] + 2.0L * g2[i]) * std::exp(-f[i]);
  }
  return sum_checked(integrand, volume_quadrature(state), options);
}

Real w_functional(const RadialKahlerState& state, const ScalarField& f, Real tau,
                  WNormalization normalization, const FunctionalOptions& options) {
  check_length(state, f);
  if (!(tau > 0.0L)) throw Error(ErrorKind::ConfigInvalid, "tau must be positive");
  const int n = state.dimension();
  const auto r = scalar_curvature(state);
  std::vector<Real> integrand(f.size());
  Real prefactor = 1.0L;
  switch (normalization) {
    case WNormalization::Riemannian: {
      const Real m = 2.0L * static_cast<Real>(n);
      const auto g2 = grad_norm_sq(state, f);
      for (std::size_t i = 0; i < f.size(); ++i) {
        integrand[i] = (tau * (2.0L * r[i] + 2.0L * g2[i]) + f[i] - m) * std::exp(-f[i]);
      }
      prefactor = std::pow(4.0L * kPi * tau, -m / 2.0L);
      break;
    }
    case WNormalization::Kahler: {
      const auto g2 = grad_norm_sq(state, f);
      for (std::size_t i = 0; i < f.size(); ++i) {
        integrand[i] = (2.0L * tau * (r[i] + g2[i]) + f[i] - 2.0L * n) * std::exp(-f[i]);
      }
      prefactor = std::pow(4.0L * kPi * tau, -static_cast<Real>(n));
      break;
    }
    case WNormalization::UForm: {
      ScalarField u(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) u[i] = std::exp(-f[i] / 2.0L);
      const auto gu = grad_norm_sq(state, u);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const Real u2 = u[i] * u[i];
        integrand[i] = 2.0L * tau * (r[i] * u2 + 4.0L * gu[i]) - x_log_x(u2) - 2.0L * n * u2;
      }
      prefactor = std::pow(4.0L * kPi * tau, -static_cast<Real>(n));
      break;
    }
  }
  return prefactor * sum_checked(integrand, volume_quadrature(state), options);
}

TestDensity make_density(const RadialKahlerState& state, std::vector<Real> u, Real tau,
                         std::size_t cutoff) {
  check_length(state, u);
  if (!(tau > 0.0L)) throw Error(ErrorKind::ConfigInvalid, "tau must be positive");
  if (cutoff >= state.size()) {
    throw Error(ErrorKind::ConfigInvalid, "density support must end inside the grid");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0L) throw Error(ErrorKind::ConfigInvalid, "density must be non-negative");
    if (i >= cutoff) u[i] = 0.0L;
  }
  UFormProblem(state, tau, cutoff).normalize(u);
  return TestDensity{std::move(u), tau, cutoff};
}

Real density_mass(const RadialKahlerState& state, const TestDensity& density) {
  check_length(state, density.u);
  const auto wq = volume_quadrature(state);
  Real acc = 0.0L;
  for (std::size_t i = 0; i < wq.size(); ++i) acc += wq[i] * density.u[i] * density.u[i];
  return acc * std::pow(4.0L * kPi * density.tau, -static_cast<Real>(state.dimension()));
}

std::size_t density_cutoff(const RadialKahlerState& state) {
  return state.size() - DiffOps::kBoundaryWidth;
}

TestDensity gaussian_density(const RadialKahlerState& state, Real tau) {
  return make_density(state, gaussian_profile(state, 2.0L * tau), tau, density_cutoff(state));
}

Real w_functional(const RadialKahlerState& state, const TestDensity& density) {
  check_length(state, density.u);
  const Real mass = density_mass(state, density);
  if (std::fabs(mass - 1.0L) > kNormalizationTolerance) {
    throw Error(ErrorKind::NormalizationViolated,
                "density mass " + std::to_string(static_cast<double>(mass)) + " differs from 1");
  }
  return UFormProblem(state, density.tau, density.cutoff).value(density.u);
}

MuResult mu_minimize(const RadialKahlerState& state, Real tau, const MinimizerControls& controls) {
  if (!(tau > 0.0L)) throw Error(ErrorKind::ConfigInvalid, "tau must be positive");
  const std::size_t cutoff = density_cutoff(state);
  const Real radius = radial_distance(state)[cutoff - 1];
  if (radius < 6.0L * std::sqrt(tau)) {
    throw Error(ErrorKind::ConfigInvalid, "truncation radius " +
                                              std::to_string(static_cast<double>(radius)) +
                                              " is below 6 sqrt(tau)");
  }
  const UFormProblem problem(state, tau, cutoff);
  MuResult best;
  bool have = false;
  for (Real width : controls.seed_widths) {
    auto u = gaussian_profile(state, 2.0L * tau * width);
    for (std::size_t i = cutoff; i < u.size(); ++i) u[i] = 0.0L;
    auto res = descend(problem, std::move(u), controls, tau);
    if (!have || res.mu < best.mu ||
        (res.mu == best.mu && res.gradient_norm < best.gradient_norm)) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

MonotonicitySeries mu_monotonicity(const FlowTrajectory& trajectory, Real tau0,
                                   MonotonicityMode mode, Real tolerance, std::size_t stride,
                                   const MinimizerControls& controls) {
  if (trajectory.size() == 0) throw Error(ErrorKind::TrajectoryTooShort, "empty trajectory");
  stride = std::max<std::size_t>(stride, 1);
  MonotonicitySeries out;
  out.mode = mode;
  const Real t0 = trajectory.time(0);
  std::vector<std::size_t> picks;
  for (std::size_t k = 0; k < trajectory.size(); k += stride) picks.push_back(k);
  if (picks.back() != trajectory.size() - 1) picks.push_back(trajectory.size() - 1);
  for (std::size_t k : picks) {
    // tau decreases at half the speed of the metric: d tau/dt = -1 when g_t = -2 Rc.
    const Real tau = mode == MonotonicityMode::Fixed
                         ? tau0
                         : tau0 - 0.5L * trajectory.speed * (trajectory.time(k) - t0);
    // A tau that is zero up to rounding counts as reaching zero.
    if (!(tau > 1e-9L * tau0)) {
      throw Error(ErrorKind::ConfigInvalid, "tau0 must exceed half the elapsed (scaled) time");
    }
    out.times.push_back(trajectory.time(k));
    out.taus.push_back(tau);
  }
  std::vector<std::future<MuResult>> jobs;
  for (std::size_t j = 0; j < picks.size(); ++j) {
    jobs.push_back(std::async(std::launch::async, [&, j] {
      return mu_minimize(trajectory.states[picks[j]], out.taus[j], controls);
    }));
  }
  for (auto& job : jobs) {
    const auto res = job.get();
    out.mu.push_back(res.mu);
    out.sample_converged.push_back(res.converged);
  }
  out.worst_rate = std::numeric_limits<Real>::infinity();
  for (std::size_t j = 1; j < out.mu.size(); ++j) {
    const Real dt = out.times[j] - out.times[j - 1];
    const Real dmu = out.mu[j] - out.mu[j - 1];
    if (dt > 0.0L) out.worst_rate = std::min(out.worst_rate, dmu / dt);
    if (dmu < -tolerance * dt) out.non_decreasing = false;
  }
  if (out.mu.size() < 2) out.worst_rate = 0.0L;
  return out;
}

namespace {

Real sobolev_constant(const RadialKahlerState& state, std::size_t iterations) {
  const int n = state.dimension();
  if (n < 2 || iterations == 0) return std::numeric_limits<Real>::quiet_NaN();
  const Real p = 2.0L * n / (n - 1.0L);
  const std::size_t free = density_cutoff(state);
  const auto wq = volume_quadrature(state);
  const auto& ddp = state.ddpotential();
  // Numerator u^T A u = sum wq (2 u'^2 / P'' + u^2) (Riemannian |grad u|^2).
  std::vector<Real> coef(state.size());
  for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = 2.0L * wq[i] / ddp[i];
  std::vector<Real> extra(wq.begin(), wq.begin() + static_cast<long>(free));
  const SparseMatrix a = dirichlet_matrix(state.ops(), coef, extra, free);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return std::numeric_limits<Real>::quiet_NaN();

  auto normalize = [&](Vector& u) {
    Real s = 0.0L;
    for (int j = 0; j < u.size(); ++j) s += wq[static_cast<std::size_t>(j)] * std::pow(std::fabs(u(j)), p);
    u /= std::pow(s, 1.0L / p);
  };
  auto seed = gaussian_profile(state, 2.0L);
  Vector u = restrict_to(seed, free);
  normalize(u);
  Real q = u.dot(a * u);
  Real alpha = 1.0L;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Vector g = 2.0L * (a * u);
    Vector c(u.size());
    for (int j = 0; j < u.size(); ++j) {
      c(j) = p * wq[static_cast<std::size_t>(j)] * std::pow(std::fabs(u(j)), p - 2.0L) * u(j);
    }
    const Vector ga = lu.solve(g), ca = lu.solve(c);
    const Vector dir = ga - (c.dot(ga) / c.dot(ca)) * ca;
    const Real slope = g.dot(dir);
    if (!(slope > 0.0L)) break;
    alpha = std::min(1.0L, 2.0L * alpha);
    bool accepted = false;
    for (int b = 0; b < kMaxBacktracks; ++b, alpha /= 2.0L) {
      Vector trial = (u - alpha * dir).cwiseMax(0.0L);
      normalize(trial);
      const Real qt = trial.dot(a * trial);
      if (qt <= q - kArmijo * alpha * slope) {
        u = trial;
        q = qt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return 1.0L / q;
}

}  // namespace

ProbeReport inequality_probes(const RadialKahlerState& state, const std::vector<Real>& radii,
                              std::size_t sobolev_iterations) {
  ProbeReport out;
  out.sobolev_constant = sobolev_constant(state, sobolev_iterations);
  const auto d = radial_distance(state);
  const auto vol = ball_volume(state);
  const auto rm = curvature_norm(state);
  const Real dim = 2.0L * static_cast<Real>(state.dimension());
  for (Real r : radii) {
    if (!(r > 0.0L) || r > d.back()) {
      throw Error(ErrorKind::ConfigInvalid, "ball radius outside the grid");
    }
    CollapseRatio c;
    c.radius = r;
    if (r <= d.front()) {
      c.volume = vol.front() * std::pow(r / d.front(), dim);  // flat model inside the first node
      c.sup_rm = rm.front();
    } else {
      const auto it = std::upper_bound(d.begin(), d.end(), r);
      const std::size_t j = static_cast<std::size_t>(it - d.begin());
      const std::size_t first = std::min(j >= 4 ? j - 4 : 0, d.size() - 8);
      const std::span<const Real> nodes(d.data() + first, 8);
      const auto w = fornberg_weights(r, nodes, 0)[0];
      for (std::size_t k = 0; k < 8; ++k) c.volume += w[k] * vol[first + k];
      for (std::size_t i = 0; i < j; ++i) c.sup_rm = std::max(c.sup_rm, rm[i]);
    }
    c.kappa = c.volume / std::pow(r, dim);
    c.admissible = c.sup_rm <= 1.0L / (r * r);
    out.collapse.push_back(c);
  }
  return out;
}

EntropyReport entropy_report(const RadialKahlerState& state, Real tau,
                             const std::vector<Real>& radii, const MinimizerControls& controls) {
  EntropyReport rep;
  rep.tau = tau;
  // Gaussian potential d^2/(4 tau), shifted so that (4 pi tau)^{-n} int e^{-f} dV = 1.
  const auto d = radial_distance(state);
  const auto wq = volume_quadrature(state);
  ScalarField f(d.size());
  Real mass = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = d[i] * d[i] / (4.0L * tau);
    mass += wq[i] * std::exp(-f[i]);
  }
  const Real shift = std::log(mass * std::pow(4.0L * kPi * tau, -static_cast<Real>(state.dimension())));
  for (auto& v : f) v += shift;
  rep.f_value = f_functional(state, f);
  rep.w_riemannian = w_functional(state, f, tau, WNormalization::Riemannian);
  rep.w_kahler = w_functional(state, f, tau, WNormalization::Kahler);
  rep.w_uform = w_functional(state, f, tau, WNormalization::UForm);
  rep.mu = mu_minimize(state, tau, controls);
  rep.probes = inequality_probes(state, radii);
  return rep;
}

}  // namespace krf
