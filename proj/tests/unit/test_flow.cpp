#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "krf/bounds.hpp"
#include "krf/flow.hpp"
#include "krf/geometry.hpp"
#include "krf/presets.hpp"

using namespace krf;

namespace {

FlowTrajectory run(const RadialKahlerState& s, Real t_end, Real dt_max, Real speed = 1.0L) {
  FlowControls fc;
  fc.dt_max = dt_max;
  fc.speed = speed;
  return evolve(s, t_end, fc);
}

Real max_diff(const ScalarField& a, const ScalarField& b, std::size_t lo, std::size_t hi) {
  Real worst = 0;
  for (std::size_t i = lo; i < hi; ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("the driver reaches t_end with steps bounded by dt_max") {
  const auto grid = make_grid(-10.0L, 8.0L, 256);
  const auto traj = run(positive_bump_state(grid, 0.5L), 0.3L, 0.02L);
  CHECK(traj.status == EndStatus::Completed);
  CHECK(std::fabs(traj.time(traj.size() - 1) - 0.3L) < 1e-15L);
  CHECK(traj.max_step() <= 0.02L + 1e-18L);
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.time(k) > traj.time(k - 1));
  CHECK(traj.diagnostics.size() == traj.size());
}

TEST_CASE("the cigar moves by the soliton diffeomorphism") {
  // Under g_t = -Ric the cigar is g(t) = phi_t^* g with R(rho, t) = 4 / (1 + e^{rho - 4t}).
  const auto grid = make_grid(-10.0L, 10.0L, 512);
  const Real t = 0.25L;
  const auto traj = run(cigar_state(grid), t, 2.5e-3L);
  const auto r = scalar_curvature(traj.states.back());
  ScalarField exact(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) exact[i] = 4 / (1 + std::exp(grid[i] - 4 * t));
  CHECK(max_diff(r, exact, 0, grid.size - 40) < 2e-3L);
}

TEST_CASE("parabolic scaling: evolving K P to K t gives K times the evolved potential") {
  const auto grid = make_grid(-10.0L, 8.0L, 256);
  const auto s = positive_bump_state(grid, 0.5L);
  const Real K = 2.0L, t = 0.2L;
  const auto base = run(s, t, 5e-3L);
  const auto scaled = run(s.rescaled(K, 0.0L), K * t, K * 5e-3L);
  const auto r = scalar_curvature(base.states.back());
  auto rk = scalar_curvature(scaled.states.back());
  for (auto& v : rk) v *= K;
  // Pole caps are re-chosen from absolute noise levels after each step, so the
  // agreement is at the rounding-noise level rather than exact.
  CHECK(max_diff(r, rk, 0, grid.size) < 1e-6L);
}

TEST_CASE("speed rescales time") {
  const auto grid = make_grid(-10.0L, 8.0L, 256);
  const auto s = positive_bump_state(grid, 0.5L);
  const auto slow = run(s, 0.2L, 5e-3L);
  const auto fast = run(s, 0.1L, 2.5e-3L, 2.0L);
  CHECK(max_diff(scalar_curvature(slow.states.back()), scalar_curvature(fast.states.back()), 0, grid.size) < 1e-8L);
}

TEST_CASE("flat space is a fixed point of a single step") {
  const auto grid = make_grid(-6.0L, 6.0L, 128);
  for (int n : {1, 2}) {
    const auto s = flat_state(n, grid);
    const auto next = krf_step(s, 0.1L);
    CHECK(max_diff(scalar_curvature(next), ScalarField(grid.size, 0.0L), 0, grid.size) < 1e-10L);
    CHECK(next.time() == doctest::Approx(0.1));
  }
}

TEST_CASE("gauge-corrected Ricci potential solves the heat equation") {
  const auto grid = make_grid(-12.0L, 8.0L, 512);
  const auto traj = run(cigar_state(grid), 0.5L, 1e-2L);
  const auto g = gauge_track(traj);
  REQUIRE(g.heat_residual.size() == traj.size());
  CHECK(g.heat_residual.front() == 0.0L);
  CHECK(*std::max_element(g.heat_residual.begin(), g.heat_residual.end()) < 0.3L);
}

TEST_CASE("evolution residuals shrink with the grid") {
  Real prev = 0;
  for (std::size_t m : {128, 256}) {
    const auto grid = make_grid(-4.0L, 4.0L, m);
    FlowControls fc;
    fc.dt_max = grid.spacing * grid.spacing / 4;
    fc.theta_curv = 1.0L;
    const auto res = evolution_residuals(evolve(positive_bump_state(grid, 0.5L), 0.05L, fc));
    CHECK(res.times.size() == res.scalar.size());
    if (prev > 0) CHECK(res.max_scalar() < prev / 2.8L);
    prev = res.max_scalar();
  }
}

TEST_CASE("bound report gates the Bernstein and decay bounds on bounded f") {
  const auto grid = make_grid(-12.0L, 8.0L, 256);
  const auto cigar = bound_report(run(cigar_state(grid), 0.5L, 1e-2L));
  CHECK_FALSE(cigar.f_bounded);
  CHECK(cigar.get("bernstein").status == BoundStatus::NotApplicable);
  CHECK(cigar.get("decay").status == BoundStatus::NotApplicable);
  CHECK(cigar.get("lower-scalar").status == BoundStatus::Pass);
  CHECK_THROWS_AS(cigar.get("no-such-bound"), Error);

  const auto capped = bound_report(run(perturbed_cigar_state(grid, 0.1L), 0.5L, 1e-2L));
  CHECK(capped.f_bounded);
  CHECK(capped.all_pass());
  CHECK(capped.c1 == doctest::Approx(static_cast<double>(2 * capped.bernstein_c * capped.c0)));
  for (const auto& b : capped.bounds) {
    INFO(b.id);
    CHECK(b.times.size() == b.lhs.size());
    CHECK(b.rhs.size() == b.lhs.size());
  }
}

TEST_CASE("the singularity monitor stays quiet on bounded flows") {
  const auto grid = make_grid(-10.0L, 8.0L, 256);
  const auto sig = singularity_monitor(run(positive_bump_state(grid, 0.5L), 0.5L, 1e-2L), 2.0L);
  CHECK_FALSE(sig.triggered);
}

TEST_CASE("mismatched inputs are rejected") {
  CHECK_THROWS_AS(flat_state(1, make_grid(0.0L, 1.0L, 4)), Error);
  const auto grid = make_grid(-6.0L, 6.0L, 64);
  CHECK_THROWS_AS(laplacian(flat_state(1, grid), ScalarField(10, 0.0L)), Error);
}
