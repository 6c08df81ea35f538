#pragma once

#include "krf/radial_state.hpp"

namespace krf {

// Conventions: Delta = g^{i jbar} d_i d_jbar, R = g^{i jbar} R_{i jbar},
// |grad h|^2 = g^{k lbar} h_k h_lbar. All derivatives below are in rho.

/// Ricci potential nrho - (n-1) log P' - log P'' gauged so that f(rho_0) = 0.
ScalarField ricci_potential(const RadialKahlerState& state);

/// The same potential without the gauge constant; under the flow it solves
/// the heat equation d_t f = Delta f.
ScalarField raw_ricci_potential(const RadialKahlerState& state);

/// Delta h = (n-1) h'/P' + h''/P''. `cap_level` selects the pole cap used to
/// regularize the result: 1 when h is potential-like (f, |z|^2), 2 when h is
/// already a curvature quantity (R, |grad f|^2).
ScalarField laplacian(const RadialKahlerState& state, const ScalarField& field,
                      int cap_level = 1);

/// Delta applied to the Ricci potential.
ScalarField scalar_curvature(const RadialKahlerState& state);

/// |grad h|^2 = (h')^2 / P''.
ScalarField grad_norm_sq(const RadialKahlerState& state, const ScalarField& field);

/// Eigenvalues of the Ricci form relative to g: radial f''/P'' and tangential
/// f'/P' (multiplicity n-1).
struct RicciEigenvalues {
  ScalarField radial;
  ScalarField tangential;
};
RicciEigenvalues ricci_eigenvalues(const RadialKahlerState& state);

/// |R_{i jbar}|^2 = g^{i jbar} g^{k lbar} R_{i lbar} R_{k jbar}.
ScalarField ricci_norm_sq(const RadialKahlerState& state);

/// |h_{ij}|^2 for the (2,0) part of the Hessian of a radial function:
/// (h'' - (P'''/P'') h')^2 / P''^2.
ScalarField hessian20_norm_sq(const RadialKahlerState& state, const ScalarField& field);

/// Riemannian radial distance from the origin, ds = sqrt(P''/2) drho.
ScalarField radial_distance(const RadialKahlerState& state);

/// Riemannian volume of the ball {rho' <= rho}: (2pi)^n P'^n / (n!).
ScalarField ball_volume(const RadialKahlerState& state);

}  // namespace krf
