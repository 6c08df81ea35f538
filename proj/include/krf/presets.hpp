#pragma once

#include <functional>
#include <string>
#include <vector>

#include "krf/radial_state.hpp"

namespace krf {

/// Samples P on the grid from a closed-form slope P'(rho). P is obtained by
/// per-cell Gauss quadrature of P', anchored with the flat model P = P' at the
/// first node.
RadialKahlerState state_from_slope(int n, const UniformGrid& grid,
                                   const std::function<Real(Real)>& slope,
                                   const Asymptotics& asymptotics, Real time = 0.0L);

struct PresetParams {
  Real bump_exponent = 0.5L;     // positive-bump: radial eigenvalue (1+x)^{-beta}
  Real cusp_exponent = 1.5L;     // cusp: radial eigenvalue (1+x)^{beta}
  Real cap_epsilon = 0.1L;       // perturbed cigar: (1 + eps x)/(4(1 + x))
  Real shrink_time = 1.0L;       // shrinking fixture: singular time T
};

/// Flat C^n, P = e^rho.
RadialKahlerState flat_state(int n, const UniformGrid& grid);

/// Cigar soliton g = |dz|^2 / (4(1+|z|^2)) on C: R = 4/(1+|z|^2), f = log(1+|z|^2).
RadialKahlerState cigar_state(const UniformGrid& grid, Real time = 0.0L);

/// Cigar metric as it sits at flow time t (c = 1): the soliton profile
/// translated by 4t in rho. Curvature 4/(1+e^{rho-4t}).
RadialKahlerState cigar_state_at(const UniformGrid& grid, Real time);

/// Cigar with a slowly opening end, radial eigenvalue (1+eps x)/(4(1+x)); its
/// Ricci potential log(1+x) - log(1+eps x) is bounded.
RadialKahlerState perturbed_cigar_state(const UniformGrid& grid, Real epsilon);

/// Positive curvature bump on C, radial eigenvalue (1+x)^{-beta}, 0 < beta < 1.
RadialKahlerState positive_bump_state(const UniformGrid& grid, Real beta);

/// Negatively curved profile on C, radial eigenvalue (1+x)^{beta}.
RadialKahlerState cusp_state(const UniformGrid& grid, Real beta);

/// U(2)-invariant metric whose momentum profile satisfies P'' = log(1 + P').
/// Its bisectional curvature is positive.
RadialKahlerState positive_bisectional_state(const UniformGrid& grid);

/// Member of the cigar family with tip scale s = 2 sqrt(T - t): radial
/// eigenvalue s/(4(1 + x/s)), tip curvature 1/(T - t).
RadialKahlerState shrinking_fixture_state(const UniformGrid& grid, Real singular_time, Real time);

/// Name lookup used by the scenario runner. Throws ConfigInvalid for an
/// unknown name or a dimension the preset does not support.
RadialKahlerState make_preset(const std::string& name, int n, const UniformGrid& grid,
                              const PresetParams& params = {});

std::vector<std::string> preset_names();

}  // namespace krf
