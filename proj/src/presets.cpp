#include "krf/presets.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace krf {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

Real cell_integral(const std::function<Real(Real)>& f, Real a, Real b) {
  return gauss<Real, 15>::integrate(f, a, b);
}

// 1/log(1+s) - 1/s, which is regular at s = 0.
Real momentum_defect(Real s) {
  if (s < 1e-4L) return 0.5L - s / 12.0L + s * s / 24.0L;
  return 1.0L / std::log1p(s) - 1.0L / s;
}

// rho as a function of the momentum phi = P' for the profile P'' = log(1 + P').
Real momentum_to_rho(Real phi) {
  const Real tail = gauss_kronrod<Real, 31>::integrate(momentum_defect, 0.0L, phi, 8, 1e-16L);
  return std::log(phi) + tail;
}

Real rho_to_momentum(Real rho) {
  Real u = rho;  // log phi; exact for the flat model near the origin
  for (int it = 0; it < 100; ++it) {
    const Real phi = std::exp(u);
    const Real residual = momentum_to_rho(phi) - rho;
    const Real slope = phi / std::log1p(phi);
    const Real step = residual / slope;
    u -= step;
    if (std::fabs(step) < 1e-17L * std::max(1.0L, std::fabs(u))) break;
  }
  return std::exp(u);
}

}  // namespace

RadialKahlerState state_from_slope(int n, const UniformGrid& grid,
                                   const std::function<Real(Real)>& slope,
                                   const Asymptotics& asymptotics, Real time) {
  std::vector<Real> p(grid.size);
  p[0] = slope(grid[0]);
  for (std::size_t i = 1; i < grid.size; ++i) {
    p[i] = p[i - 1] + cell_integral(slope, grid[i - 1], grid[i]);
  }
  return build_state(n, grid, std::move(p), asymptotics, time);
}

RadialKahlerState flat_state(int n, const UniformGrid& grid) {
  std::vector<Real> p(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) p[i] = std::exp(grid[i]);
  return build_state(n, grid, std::move(p), Asymptotics{FarField::Exponential, 1.0L, true});
}

RadialKahlerState cigar_state_at(const UniformGrid& grid, Real time) {
  const Real shift = 4.0L * time;
  auto slope = [shift](Real rho) { return 0.25L * std::log1p(std::exp(rho - shift)); };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Cylindrical, 0.25L, false}, time);
}

RadialKahlerState cigar_state(const UniformGrid& grid, Real time) {
  auto slope = [](Real rho) { return 0.25L * std::log1p(std::exp(rho)); };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Cylindrical, 0.25L, false}, time);
}

RadialKahlerState perturbed_cigar_state(const UniformGrid& grid, Real epsilon) {
  auto slope = [epsilon](Real rho) {
    const Real x = std::exp(rho);
    return 0.25L * (epsilon * x + (1.0L - epsilon) * std::log1p(x));
  };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Exponential, 1.0L, true});
}

RadialKahlerState positive_bump_state(const UniformGrid& grid, Real beta) {
  const Real a = 1.0L - beta;
  auto slope = [a](Real rho) { return std::expm1(a * std::log1p(std::exp(rho))) / a; };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Exponential, a, false});
}

RadialKahlerState cusp_state(const UniformGrid& grid, Real beta) {
  const Real a = 1.0L + beta;
  auto slope = [a](Real rho) { return std::expm1(a * std::log1p(std::exp(rho))) / a; };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Exponential, a, false});
}

RadialKahlerState positive_bisectional_state(const UniformGrid& grid) {
  std::vector<Real> p(grid.size);
  // P as a function of the momentum: dP/dphi = phi / log(1 + phi).
  auto integrand = [](Real s) { return s < 1e-8L ? 1.0L + s / 2.0L : s / std::log1p(s); };
  Real prev_phi = rho_to_momentum(grid[0]);
  p[0] = prev_phi;
  for (std::size_t i = 1; i < grid.size; ++i) {
    const Real phi = rho_to_momentum(grid[i]);
    p[i] = p[i - 1] + gauss<Real, 15>::integrate(integrand, prev_phi, phi);
    prev_phi = phi;
  }
  return build_state(2, grid, std::move(p), Asymptotics{FarField::Cylindrical, 0.0L, false});
}

RadialKahlerState shrinking_fixture_state(const UniformGrid& grid, Real singular_time, Real time) {
  const Real s = 2.0L * std::sqrt(singular_time - time);
  auto slope = [s](Real rho) { return 0.25L * s * s * std::log1p(std::exp(rho) / s); };
  return state_from_slope(1, grid, slope, Asymptotics{FarField::Cylindrical, 0.25L * s * s, false},
                          time);
}

RadialKahlerState make_preset(const std::string& name, int n, const UniformGrid& grid,
                              const PresetParams& params) {
  auto require_dim = [&](int want) {
    if (n != want) {
      throw Error(ErrorKind::ConfigInvalid,
                  "preset '" + name + "' requires n = " + std::to_string(want));
    }
  };
  if (name == "flat") return flat_state(n, grid);
  if (name == "cigar") return require_dim(1), cigar_state(grid);
  if (name == "perturbed-cigar") return require_dim(1), perturbed_cigar_state(grid, params.cap_epsilon);
  if (name == "positive-bump") return require_dim(1), positive_bump_state(grid, params.bump_exponent);
  if (name == "cusp") return require_dim(1), cusp_state(grid, params.cusp_exponent);
  if (name == "u2-positive-bisectional") return require_dim(2), positive_bisectional_state(grid);
  if (name == "shrinking-fixture") {
    return require_dim(1), shrinking_fixture_state(grid, params.shrink_time, 0.0L);
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"flat", "cigar", "perturbed-cigar", "positive-bump",
          "cusp", "u2-positive-bisectional", "shrinking-fixture"};
}

}  // namespace krf
