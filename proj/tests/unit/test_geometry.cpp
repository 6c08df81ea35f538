#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "krf/curvature.hpp"
#include "krf/geometry.hpp"
#include "krf/presets.hpp"
#include "oracles.hpp"

using namespace krf;
using oracle::kPi;

namespace {

Real max_rel_interior(const ScalarField& got, const std::vector<Real>& want, std::size_t lo, std::size_t hi) {
  Real worst = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    worst = std::max(worst, std::fabs(got[i] - want[i]) / std::max(1.0L, std::fabs(want[i])));
  }
  return worst;
}

}  // namespace

TEST_CASE("flat C^n has vanishing curvature and Euclidean distance and volume") {
  for (int n : {1, 2, 3}) {
    const auto grid = make_grid(-6.0L, 4.0L, 128);
    const auto s = flat_state(n, grid);
    const auto r = scalar_curvature(s);
    const auto d = radial_distance(s);
    const auto v = ball_volume(s);
    Real worst_r = 0, worst_d = 0, worst_v = 0;
    Real fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst_r = std::max(worst_r, std::fabs(r[i]));
      // |z|^2 = e^rho and the Riemannian metric is 2|dz|^2, so d = sqrt(2) |z|.
      const Real dist = std::sqrt(2.0L) * std::exp(grid[i] / 2);
      worst_d = std::max(worst_d, std::fabs(d[i] - dist) / dist);
      // Euclidean ball of radius d in R^{2n}: pi^n d^{2n} / n!.
      const Real vol = std::pow(kPi, n) * std::pow(dist, 2 * n) / fact;
      worst_v = std::max(worst_v, std::fabs(v[i] - vol) / vol);
    }
    INFO("n = " << n);
    CHECK(worst_r < 1e-9L);
    CHECK(worst_d < 1e-6L);
    CHECK(worst_v < 1e-10L);
  }
}

TEST_CASE("Laplacian of |z|^2 on flat C^n equals n") {
  for (int n : {1, 2}) {
    const auto grid = make_grid(-6.0L, 4.0L, 128);
    const auto s = flat_state(n, grid);
    ScalarField h(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) h[i] = std::exp(grid[i]);
    const auto lap = laplacian(s, h);
    Real worst = 0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::fabs(lap[i] - n));
    CHECK(worst < 1e-8L);
  }
}

TEST_CASE("cigar satisfies the steady soliton identities") {
  const auto grid = make_grid(-10.0L, 10.0L, 512);
  const auto s = cigar_state(grid);
  const auto r = scalar_curvature(s);
  const auto f = ricci_potential(s);
  const auto g = grad_norm_sq(s, f);
  std::vector<Real> r_exact(s.size()), g_exact(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real x = std::exp(grid[i]);
    r_exact[i] = 4 / (1 + x);
    g_exact[i] = 4 * x / (1 + x);
  }
  CHECK(max_rel_interior(r, r_exact, 0, s.size()) < 1e-7L);
  CHECK(max_rel_interior(g, g_exact, 0, s.size()) < 1e-7L);
  // f = log(1 + |z|^2) up to the gauge constant.
  Real spread = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real diff = f[i] - std::log1p(std::exp(grid[i]));
    spread = std::max(spread, std::fabs(diff - (f[0] - std::log1p(std::exp(grid[0])))));
  }
  CHECK(spread < 1e-8L);
}

TEST_CASE("one-dimensional presets match closed-form scalar curvature") {
  // For n = 1, R = -(log(P'' e^{-rho}))'' / P''.
  const auto grid = make_grid(-8.0L, 6.0L, 512);
  const Real beta_bump = 0.5L, beta_cusp = 1.5L;
  const auto bump = scalar_curvature(positive_bump_state(grid, beta_bump));
  const auto cusp = scalar_curvature(cusp_state(grid, beta_cusp));
  std::vector<Real> want_bump(grid.size), want_cusp(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const Real x = std::exp(grid[i]);
    want_bump[i] = beta_bump * std::pow(1 + x, beta_bump - 2);
    want_cusp[i] = -beta_cusp * std::pow(1 + x, -beta_cusp - 2);
  }
  CHECK(max_rel_interior(bump, want_bump, 0, grid.size) < 1e-6L);
  CHECK(max_rel_interior(cusp, want_cusp, 0, grid.size) < 1e-6L);
}

TEST_CASE("U(2)-invariant quartic potential agrees with the ambient finite-difference Ricci form") {
  const oracle::Quartic pot(0.3L);
  const auto grid = make_grid(-6.0L, 2.0L, 512);
  std::vector<Real> p(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) p[i] = pot.p(grid[i]);
  const auto s = build_state(2, grid, std::move(p), Asymptotics{FarField::Exponential, 2.0L, false});
  const auto r = scalar_curvature(s);
  const auto eig = ricci_eigenvalues(s);
  for (Real rho : {-3.0L, -1.0L, 0.0L, 1.0L}) {
    const auto i = static_cast<std::size_t>(std::lround((rho - grid.start) / grid.spacing));
    const Real at = grid[i];
    Eigen::VectorX<oracle::C> w(2);
    w << oracle::C(std::exp(at / 2), 0), oracle::C(0, 0);
    const auto amb = oracle::ambient_ricci(pot, w);
    // At w = (|w|, 0) the frame is diagonal: e_1 radial, e_2 tangential.
    const Real radial = (amb.ric(0, 0) / amb.g(0, 0)).real();
    const Real tangential = (amb.ric(1, 1) / amb.g(1, 1)).real();
    INFO("rho = " << static_cast<double>(at));
    CHECK(std::fabs(r[i] - amb.scalar) < 1e-5L * std::max(1.0L, std::fabs(amb.scalar)));
    CHECK(std::fabs(eig.radial[i] - radial) < 1e-5L);
    CHECK(std::fabs(eig.tangential[i] - tangential) < 1e-5L);
  }
}

TEST_CASE("curvature tensor of a space form") {
  for (int n : {1, 2, 3}) {
    const Real c = 0.7L;
    const auto pd = make_point_data(n, space_form_tensor(n, c));
    INFO("n = " << n);
    // Ric = (n+1) c g, R = n(n+1) c, holomorphic sectional 2c, bisectional in [c, 2c].
    CHECK(std::fabs(pd.scalar - n * (n + 1) * c) < 1e-15L);
    CHECK(pd.traceless_ricci.cwiseAbs().maxCoeff() < 1e-15L);
    for (Real h : pd.holomorphic_sectional) CHECK(std::fabs(h - 2 * c) < 1e-15L);
    CHECK(std::fabs(pd.bisectional_max - 2 * c) < 1e-15L);
    if (n > 1) CHECK(std::fabs(pd.bisectional_min - c) < 1e-15L);
  }
}

TEST_CASE("Phong-Sturm operator on a space form is c times the identity") {
  const int n = 2;
  const Real c = 0.7L;
  const auto ps = phong_sturm_operator(make_point_data(n, space_form_tensor(n, c)), n);
  const auto dim = ps.matrix.rows();
  CHECK(dim == n * n - 1);
  const RealMatrix diff = ps.matrix - c * RealMatrix::Identity(dim, dim);
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-15L);
  CHECK(std::fabs(ps.sum_two_lowest - 2 * c) < 1e-15L);
}

TEST_CASE("non-hermitian tensors are rejected") {
  auto t = space_form_tensor(2, 1.0L);
  t[1] += Complex(0.5L, 0.25L);
  CHECK_THROWS_AS(phong_sturm_operator(make_point_data(2, t), 2), Error);
}

TEST_CASE("curvature norm of the cigar tip is the Gauss curvature") {
  const auto grid = make_grid(-10.0L, 10.0L, 512);
  const auto s = cigar_state(grid);
  const auto rm = curvature_norm(s);
  const auto r = scalar_curvature(s);
  // n = 1: the only component is R_{1 1bar 1 1bar} = R.
  for (std::size_t i = s.cap_index(2); i + 8 < s.size(); i += 17) CHECK(std::fabs(rm[i] - std::fabs(r[i])) < 1e-9L);
}
