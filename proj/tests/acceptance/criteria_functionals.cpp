// Criteria 7-11: modified-flow chain, entropy, blow-up, Phong-Sturm, collapse.
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "criteria.hpp"
#include "krf/blowup.hpp"
#include "krf/chain.hpp"
#include "krf/curvature.hpp"
#include "krf/flow.hpp"
#include "krf/functionals.hpp"
#include "krf/presets.hpp"
#include "krf/surface.hpp"

namespace krf::acceptance {

namespace {

constexpr Real kPi = 3.14159265358979323846264338327950288L;

std::string join(std::string& acc, const std::string& part) {
  return acc += (acc.empty() ? "" : "; ") + part;
}

}  // namespace

bool modified_flow_chain(std::string& detail) {
  const std::vector<std::pair<std::string, WarpedSurfaceState>> fixtures = {
      {"round sphere", round_sphere_surface(1.0L, 64)},
      {"flat cylinder", flat_cylinder_surface(1.0L, 2.0L * kPi, 64)},
  };
  bool ok = true;
  for (const auto& [name, s] : fixtures) {
    const ChainControls controls;
    const auto rep = modified_flow_chain(s, ScalarField(s.size(), 0.0L), controls);
    Real sup_k = 0.0L;
    for (Real k : gauss_curvature(s)) sup_k = std::max(sup_k, std::fabs(k));
    const Real tol = 10.0L * (rep.ds * rep.ds + rep.h * rep.h) * std::max(1.0L, sup_k);
    const bool pass = rep.max_check() < tol && rep.max_w_defect() < 1e-6L;
    join(detail, name + ": check " + sci(rep.max_check()) + " (tol " + sci(tol) + "), W defect " +
                     sci(rep.max_w_defect()) + " (< 1e-6)");
    ok = ok && pass;
  }
  return ok;
}

bool entropy_anchors(std::string& detail) {
  const auto grid = make_grid(-14.0L, 5.0L, 512);
  const auto flat = flat_state(1, grid);
  const auto mu = mu_minimize(flat, 1.0L);
  // Analytic shrinker density e^{-d^2/8}, d^2 = 2 e^rho; it already has unit
  // mass against (4 pi)^{-1} 2 pi e^rho d rho.
  const auto& u = mu.minimizer.u;
  Real dist = 0.0L;
  for (std::size_t i = 0; i + 1 < flat.size(); ++i) {
    auto term = [&](std::size_t j) {
      const Real x = std::exp(grid[j]);
      const Real diff = u[j] - std::exp(-x / 4.0L);
      return diff * diff * 2.0L * kPi * x;
    };
    dist += 0.5L * grid.spacing * (term(i) + term(i + 1));
  }
  dist = std::sqrt(dist / (4.0L * kPi));
  const bool anchor = mu.mu >= -5e-3L && mu.mu <= 1e-2L && dist < 1e-2L;
  detail = "flat mu = " + sci(mu.mu) + " in [-5e-3, 1e-2], L2 distance to Gaussian " + sci(dist) +
           " (< 1e-2)" + (mu.converged ? "" : ", minimizer not converged");

  const auto bump_grid = make_grid(-12.0L, 8.0L, 256);
  FlowControls fc;
  fc.dt_max = 5e-3L;
  const auto traj = evolve(positive_bump_state(bump_grid, PresetParams{}.bump_exponent), 0.5L, fc);
  const auto mono = mu_monotonicity(traj, 1.0L, MonotonicityMode::Shifted, 1e-4L, 10);
  const bool converged = std::all_of(mono.sample_converged.begin(), mono.sample_converged.end(),
                                     [](bool c) { return c; });
  detail += "; positive-bump shifted mu over " + std::to_string(mono.times.size()) +
            " samples, worst rate " + sci(mono.worst_rate) + " (>= -1e-4)" +
            (converged ? "" : ", some samples not converged");
  return anchor && mono.non_decreasing && mono.worst_rate >= -1e-4L && mono.times.size() >= 2;
}

bool blowup_machinery(std::string& detail) {
  const auto grid = make_grid(-16.0L, 16.0L, 1024);
  const Real T = 1.0L;
  std::vector<RadialKahlerState> states;
  for (int k = 0; k <= 40; ++k) {
    states.push_back(shrinking_fixture_state(grid, T, T - std::pow(0.5L, k / 4.0L)));
  }
  const auto traj = trajectory_from_states(std::move(states), 1.0L);

  Real tip = 0.0L;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Real expected = 1.0L / (T - traj.time(k));
    tip = std::max(tip, std::fabs(traj.diagnostics[k].sup_rm - expected) / expected);
  }

  SelectionOptions opts;
  opts.window_constant = 2.0L;
  const auto entries = select_sequence(traj, opts);
  Real norm = 0.0L, defect = 0.0L, window = 0.0L;
  bool inside = true;
  for (const auto& e : entries) {
    const Real start = e.time - 1.0L / (opts.window_constant * e.curvature);
    inside = inside && start >= traj.time(0) - 1e-12L;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const Real t = traj.time(k);
      if (t < start - 1e-12L || t > e.time + 1e-12L) continue;
      window = std::max(window, traj.diagnostics[k].sup_rm / (opts.window_constant * e.curvature));
    }
    const auto flow = rescale_pointed(traj, e, 1.0L / opts.window_constant);
    norm = std::max(norm, std::fabs(flow.base_rm - 1.0L));
    defect = std::max(defect, flow.scalar_transform_defect);
  }
  detail = std::to_string(entries.size()) + " entries; max|base |Rm| - 1| = " + sci(norm) +
           " (< 1e-8), window sup / (C K) = " + sci(window) + " (<= 1), scalar transform defect " +
           sci(defect) + " (< 1e-10), tip vs 1/(T-t) " + sci(tip) + " (< 1e-4)";
  return entries.size() >= 2 && inside && norm < 1e-8L && window <= 1.0L && defect < 1e-10L &&
         tip < 1e-4L;
}

namespace {

using Tensor = std::vector<Complex>;

std::size_t idx(int n, int i, int j, int k, int l) {
  return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
}

// Average over the group generated by i <-> k, j <-> l and R -> conj(R_{j i l k}).
Tensor kahler_symmetrize(int n, const Tensor& t) {
  Tensor out(t.size(), Complex(0.0L, 0.0L));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Complex acc(0.0L, 0.0L);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              const int i1 = a ? k : i, k1 = a ? i : k;
              const int j1 = b ? l : j, l1 = b ? j : l;
              acc += t[idx(n, i1, j1, k1, l1)];
              acc += std::conj(t[idx(n, j1, i1, l1, k1)]);
            }
          out[idx(n, i, j, k, l)] = acc / 8.0L;
        }
  return out;
}

// Direct index contraction of the operator on a hermitian form.
RealMatrix brute_force_operator(int n, const Tensor& r, const std::vector<ComplexMatrix>& basis) {
  ComplexMatrix ric = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) ric(i, j) += r[idx(n, i, j, k, k)];
  Complex scalar(0.0L, 0.0L);
  for (int i = 0; i < n; ++i) scalar += ric(i, i);
  const Real nn = static_cast<Real>(n);
  ComplexMatrix trless = ric - (scalar / nn) * ComplexMatrix::Identity(n, n);
  auto delta = [](int a, int b) { return a == b ? 1.0L : 0.0L; };
  auto apply = [&](const ComplexMatrix& phi) {
    ComplexMatrix img = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const Complex s = r[idx(n, i, j, k, l)] -
                              (trless(i, j) * delta(k, l) + delta(i, j) * trless(k, l)) / nn +
                              scalar / (nn * nn) * delta(i, j) * delta(k, l);
            img(i, j) += s * phi(l, k);
          }
    return img;
  };
  const auto dim = static_cast<Eigen::Index>(basis.size());
  RealMatrix m(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const ComplexMatrix img = apply(basis[static_cast<std::size_t>(b)]);
    for (Eigen::Index a = 0; a < dim; ++a) m(a, b) = (basis[static_cast<std::size_t>(a)] * img).trace().real();
  }
  return m;
}

}  // namespace

bool phong_sturm(std::string& detail) {
  const int n = 2;
  const auto space_form = phong_sturm_operator(make_point_data(n, space_form_tensor(n, 1.0L)), n);
  const Real vanish = space_form.matrix.cwiseAbs().maxCoeff();

  const auto basis = traceless_hermitian_basis(n);
  Real ortho = 0.0L;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    ortho = std::max(ortho, std::abs(basis[a].trace()));
    for (std::size_t b = 0; b < basis.size(); ++b) {
      ortho = std::max(ortho, std::abs((basis[a] * basis[b]).trace() - Complex(a == b ? 1.0L : 0.0L)));
    }
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Real worst = 0.0L;
  for (int trial = 0; trial < 20; ++trial) {
    Tensor raw(static_cast<std::size_t>(n * n * n * n));
    for (auto& z : raw) z = Complex(normal(rng), normal(rng));
    const auto r = kahler_symmetrize(n, raw);
    const auto lib = phong_sturm_operator(make_point_data(n, r), n).matrix;
    const auto ref = brute_force_operator(n, r, basis);
    worst = std::max(worst, (lib - ref).cwiseAbs().maxCoeff());
  }
  detail = "space form (c = 1) max|S| = " + sci(vanish) + " (< 1e-10); random tensors max deviation " +
           sci(worst) + " (< 1e-10); basis orthonormality " + sci(ortho);
  return vanish < 1e-10L && worst < 1e-10L && ortho < 1e-12L;
}

bool collapse_probe(std::string& detail) {
  const auto flat = flat_state(1, make_grid(-12.0L, 6.0L, 1024));
  const Real flat_kappa = inequality_probes(flat, {1.0L}, 0).collapse.front().kappa;

  const auto cigar = cigar_state(make_grid(-16.0L, 200.0L, 4096));
  std::vector<Real> radii;
  for (Real r = 0.25L; r <= 64.0L; r *= std::sqrt(2.0L)) radii.push_back(r);
  const auto probes = inequality_probes(cigar, radii, 0).collapse;
  bool monotone = true;
  Real match = 0.0L;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const Real r = probes[k].radius;
    // Ball of radius r around the tip: Vol = pi log cosh(sqrt 2 r).
    const Real exact = kPi * std::log(std::cosh(std::sqrt(2.0L) * r)) / (r * r);
    match = std::max(match, std::fabs(probes[k].kappa - exact));
    if (k > 0 && probes[k].kappa > probes[k - 1].kappa) monotone = false;
  }
  const Real ratio = probes.back().kappa / probes.front().kappa;
  detail = "flat kappa(1) - pi = " + sci(flat_kappa - kPi) + " (< 1e-6); cigar kappa " +
           (monotone ? "non-increasing" : "NOT non-increasing") + " over r in [" + sci(radii.front()) +
           ", " + sci(radii.back()) + "], kappa(r_max)/kappa(r_min) = " + sci(ratio) +
           " (< 0.05), max deviation from closed form " + sci(match) + " (< 1e-4)";
  return std::fabs(flat_kappa - kPi) < 1e-6L && monotone && ratio < 0.05L && match < 1e-4L;
}

}  // namespace krf::acceptance
