#include <doctest.h>

#include <cmath>

#include "krf/blowup.hpp"
#include "krf/flow.hpp"
#include "krf/geometry.hpp"
#include "krf/presets.hpp"

using namespace krf;

namespace {

FlowTrajectory fixture(std::size_t samples = 33) {
  const auto grid = make_grid(-16.0L, 16.0L, 768);
  std::vector<RadialKahlerState> states;
  for (std::size_t k = 0; k < samples; ++k) {
    states.push_back(shrinking_fixture_state(grid, 1.0L, 1 - std::pow(0.5L, k / 4.0L)));
  }
  return trajectory_from_states(std::move(states), 1.0L);
}

}  // namespace

TEST_CASE("rescaling multiplies the potential and divides curvature") {
  const auto s = positive_bump_state(make_grid(-10.0L, 8.0L, 256), 0.5L);
  const Real k = 3.5L;
  const auto g = s.rescaled(k, 0.25L);
  CHECK(g.time() == doctest::Approx(0.25));
  const auto r = scalar_curvature(s), rk = scalar_curvature(g);
  const auto v = ball_volume(s), vk = ball_volume(g);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::fabs(k * rk[i] - r[i]) < 1e-12L * std::max(1.0L, std::fabs(r[i])));
    CHECK(std::fabs(vk[i] - k * v[i]) < 1e-12L * k * v[i]);
  }
}

TEST_CASE("sequence selection on the shrinking fixture") {
  const auto traj = fixture();
  SelectionOptions opts;
  const auto entries = select_sequence(traj, opts);
  REQUIRE(entries.size() >= 2);
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const auto& e = entries[j];
    CHECK(e.window_start >= traj.time(0) - 1e-12L);
    CHECK(e.window_sup <= opts.window_constant * e.curvature);
    CHECK(std::fabs(e.window_start - (e.time - 1 / (opts.window_constant * e.curvature))) < 1e-12L);
    // The maximum of |Rm| sits at the tip.
    CHECK(e.node <= traj.states[e.step].cap_index(2) + 2);
    if (j > 0) CHECK(e.curvature >= opts.ratio * entries[j - 1].curvature);
  }
  CHECK(entries.size() <= opts.max_entries);
}

TEST_CASE("pointed rescaling normalizes the base point") {
  const auto traj = fixture();
  const auto entries = select_sequence(traj);
  std::vector<RescaledFlow> flows;
  for (const auto& e : entries) {
    const auto f = rescale_pointed(traj, e, 0.5L);
    CHECK(std::fabs(f.base_rm - 1) < 1e-9L);
    CHECK(f.scalar_transform_defect < 1e-10L);
    CHECK(f.states[f.base_index].time() == doctest::Approx(0.0));
    for (const auto& st : f.states) CHECK(st.time() >= -0.5L - 1e-12L);
    flows.push_back(f);
  }
  const auto lim = limit_diagnostics(flows);
  REQUIRE(lim.entries.size() == flows.size());
  REQUIRE(lim.profile_distance.size() + 1 == flows.size());
  // Every rescaled metric is the unit-tip cigar, so the profiles coincide.
  for (Real d : lim.profile_distance) CHECK(d < 1e-3L);
  CHECK(lim.uniform_rm_bound <= 2.0L + 1e-9L);
  for (const auto& e : lim.entries) CHECK(std::fabs(e.ricci_residual - 1) < 1e-3L);
  CHECK_FALSE(lim.ricci_residual_decreasing);
}

TEST_CASE("pointed profile of the unit cigar") {
  const auto traj = fixture();
  const auto flow = rescale_pointed(traj, select_sequence(traj).back(), 0.5L);
  const auto p = pointed_profile(flow, 4.0L);
  REQUIRE(p.sigma.size() == p.fiber.size());
  // Unit-tip cigar: fiber radius tanh(sigma) with sigma measured from the tip
  // (ds^2 + tanh^2 s dtheta^2 has Gauss curvature 2 / cosh^2 s, 2 at the tip),
  // rescaled so that the tip curvature is 1. The base node sits a little off
  // the pole, so distances from the tip are sigma plus the base distance.
  const Real d0 = radial_distance(flow.states[flow.base_index])[flow.entry.node];
  for (std::size_t i = 0; i < p.sigma.size(); i += 7) {
    const Real sigma = p.sigma[i];
    if (sigma < 0.5L) continue;
    const Real want = std::sqrt(2.0L) * std::tanh((sigma + d0) / std::sqrt(2.0L));
    CHECK(std::fabs(p.fiber[i] - want) < 1e-4L);
  }
}

TEST_CASE("blow-up failure modes") {
  const auto traj = fixture(9);
  CHECK_THROWS_AS(rescale_pointed(traj, select_sequence(traj).back(), 1e6L), Error);
  CHECK_THROWS_AS(select_sequence(trajectory_from_states({traj.states.front()}, 1.0L)), Error);

  FlowControls fc;
  const auto bounded = evolve(positive_bump_state(make_grid(-10.0L, 8.0L, 128), 0.5L), 0.3L, fc);
  try {
    select_sequence(bounded);
    FAIL("expected NoAdmissiblePoints");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoAdmissiblePoints);
  }
}
