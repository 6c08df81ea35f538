#include <doctest.h>

#include <cmath>
#include <limits>

#include "krf/chain.hpp"
#include "krf/presets.hpp"
#include "krf/surface.hpp"
#include "oracles.hpp"

using namespace krf;
using oracle::kPi;

TEST_CASE("round sphere fixture: curvature, area and F") {
  const Real r = 1.7L;
  const auto s = round_sphere_surface(r, 64);
  for (Real k : gauss_curvature(s)) CHECK(std::fabs(k - 1 / (r * r)) < 1e-8L);
  CHECK(std::fabs(surface_area(s) - 4 * kPi * r * r) < 1e-9L);
  // F with f = 0 is the total scalar curvature, 2 K area = 8 pi.
  CHECK(std::fabs(surface_f_functional(s, ScalarField(s.size(), 0.0L)) - 8 * kPi) < 1e-8L);
}

TEST_CASE("flat cylinder and disk fixtures are flat") {
  for (Real k : gauss_curvature(flat_cylinder_surface(0.8L, 3.0L, 32))) CHECK(std::fabs(k) < 1e-14L);
  const auto disk = flat_disk_surface(2.0L, 64);
  for (std::size_t i = 0; i + 4 < disk.size(); ++i) CHECK(std::fabs(gauss_curvature(disk)[i]) < 1e-9L);
}

TEST_CASE("Kahler surfaces carry the Kahler scalar curvature as Gauss curvature") {
  const auto s = surface_from_kahler(cigar_state(make_grid(-8.0L, 8.0L, 512)));
  const auto k = gauss_curvature(s);
  for (std::size_t i = 8; i + 8 < s.size(); i += 13) {
    const Real x = std::exp(s.x(i));
    CHECK(std::fabs(k[i] - 4 / (1 + x)) < 1e-6L);
  }
}

TEST_CASE("first variation of W vanishes at the Gaussian shrinker") {
  const Real tau = 1.0L;
  const auto s = flat_disk_surface(14.0L, 512);
  ScalarField f(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) f[i] = s.x(i) * s.x(i) / (4 * tau);
  ScalarField vxx(s.size(), 0.0L), vtt(s.size(), 0.0L);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real y = (s.x(i) - 2.0L) / 1.5L;
    if (std::fabs(y) < 1) {
      vxx[i] = std::exp(-1 / (1 - y * y));
      vtt[i] = -0.5L * std::exp(-1 / (1 - y * y)) * s.w[i] * s.w[i];
    }
  }
  const auto res = variation_residual(s, f, make_variation(s, vxx, vtt), tau);
  CHECK(std::fabs(res.analytic_w) < 1e-8L);
  CHECK(std::fabs(res.fd_w) < 1e-8L);
  CHECK(std::fabs(res.analytic_f) > 1e-3L);
}

TEST_CASE("zero variation gives exactly zero") {
  const auto s = round_sphere_surface(1.0L, 32);
  const ScalarField f(s.size(), 0.3L), zero(s.size(), 0.0L);
  const auto res = variation_residual(s, f, make_variation(s, zero, zero), 1.0L);
  CHECK(res.analytic_f == 0.0L);
  CHECK(res.fd_f == 0.0L);
  CHECK(res.relative_w == 0.0L);
}

TEST_CASE("pullback by the identity is the identity") {
  const auto s = round_sphere_surface(1.0L, 32);
  ScalarField f(s.size()), phi(s.size()), dphi(s.size(), 1.0L);
  for (std::size_t i = 0; i < s.size(); ++i) {
    f[i] = std::cos(s.x(i));
    phi[i] = s.x(i);
  }
  const auto p = pull_back(s, f, phi, dphi);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::fabs(p.surface.w[i] - s.w[i]) < 1e-12L);
    CHECK(std::fabs(p.f[i] - f[i]) < 1e-12L);
  }
  phi.back() = 10.0L;
  CHECK_THROWS_AS(pull_back(s, f, phi, dphi), Error);
}

TEST_CASE("modified-flow chain on the round sphere is a Ricci flow after rescaling") {
  const auto s = round_sphere_surface(1.0L, 48);
  ChainControls c;
  c.samples = 9;
  const auto rep = modified_flow_chain(s, ScalarField(s.size(), 0.0L), c);
  CHECK(rep.max_check() < 1e-6L);
  CHECK(rep.max_w_defect() < 1e-10L);
  // C(s) = 1 - s/tau and t = -tau log C.
  for (std::size_t k = 0; k < rep.s.size(); ++k) {
    CHECK(std::fabs(rep.scale[k] - (1 - rep.s[k] / c.tau)) < 1e-15L);
    CHECK(std::fabs(rep.t[k] + c.tau * std::log(rep.scale[k])) < 1e-15L);
  }
  // Round sphere under d_s g = -2 Rc: area 4 pi (1 - 2 s).
  CHECK(std::fabs(surface_area(rep.checked.back()) - 4 * kPi * (1 - 2 * rep.s.back())) < 1e-6L);
}

TEST_CASE("the chain refuses s_end at or beyond tau") {
  const auto s = round_sphere_surface(1.0L, 16);
  ChainControls c;
  c.tau = 0.2L;
  c.s_end = 0.2L;
  CHECK_THROWS_AS(modified_flow_chain(s, ScalarField(s.size(), 0.0L), c), Error);
}

TEST_CASE("infinite tau reduces the chain to plain Ricci flow") {
  const auto s = flat_cylinder_surface(1.0L, 4.0L, 16);
  ChainControls c;
  c.tau = std::numeric_limits<Real>::infinity();
  c.samples = 5;
  const auto rep = modified_flow_chain(s, ScalarField(s.size(), 0.0L), c);
  for (Real k : rep.scale) CHECK(k == 1.0L);
  CHECK(rep.max_check() < 1e-12L);
}
