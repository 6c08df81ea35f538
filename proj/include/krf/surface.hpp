#pragma once

#include <vector>

#include "krf/radial_state.hpp"

namespace krf {

/// How a surface is continued past an end face.
enum class SurfaceEnd {
  Pole,    // w -> 0 with dw/ds -> 1: w odd, everything else even across the face
  Mirror,  // all fields even across the face (a closed end by reflection)
  Open,    // truncated end: ghosts by polynomial extrapolation
};

/// Rotationally symmetric surface g = a(x) dx^2 + w(x)^2 dtheta^2 sampled at
/// cell centers x_i = x0 + (i + 1/2) h, i < m. The end faces are x0 and x0 + m h.
/// a = 1 means x is arclength.
struct WarpedSurfaceState {
  Real x0 = 0.0L;
  Real h = 1.0L;
  std::vector<Real> a;
  std::vector<Real> w;
  SurfaceEnd left = SurfaceEnd::Open;
  SurfaceEnd right = SurfaceEnd::Open;
  Real time = 0.0L;

  std::size_t size() const { return w.size(); }
  Real x(std::size_t i) const { return x0 + (static_cast<Real>(i) + 0.5L) * h; }
  Real length() const { return h * static_cast<Real>(w.size()); }
};

/// Validates positivity, sizes, and smooth closure at pole ends (|dw/ds - 1|
/// at the face below 1e-5). Throws MetricDegenerate or GridTooCoarse.
WarpedSurfaceState make_surface(Real x0, Real h, std::vector<Real> a, std::vector<Real> w,
                                SurfaceEnd left, SurfaceEnd right, Real time = 0.0L);

/// Round sphere of the given radius in arclength, poles at both ends.
WarpedSurfaceState round_sphere_surface(Real radius, std::size_t m);
/// Flat cylinder w = circumference/(2 pi) over [0, length], mirror ends.
WarpedSurfaceState flat_cylinder_surface(Real warp, Real length, std::size_t m);
/// Flat plane w = s over [0, length]: pole at 0, open outer end.
WarpedSurfaceState flat_disk_surface(Real length, std::size_t m);
/// A one-dimensional Kahler state as a surface in the rho coordinate:
/// a = P''/2, w = sqrt(2 P''). Both ends open.
WarpedSurfaceState surface_from_kahler(const RadialKahlerState& state);

/// Derivatives of a cell-centered field, continued past the ends with the
/// given parity rule (w-type fields are odd at poles).
enum class Parity { Even, Odd };
std::vector<Real> surface_d1(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p);
std::vector<Real> surface_d2(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p);

/// Integral of F over the x-interval, midpoint rule with Euler-Maclaurin end
/// corrections through h^6. `p` is the parity of F at pole ends.
Real surface_integral(const WarpedSurfaceState& s, const std::vector<Real>& values, Parity p);

ScalarField gauss_curvature(const WarpedSurfaceState& s);
/// Riemannian |grad f|^2 = f_x^2 / a.
ScalarField surface_grad_norm_sq(const WarpedSurfaceState& s, const ScalarField& f);
/// Hessian components (xx and theta-theta) of f.
struct SurfaceTensor {
  ScalarField xx;
  ScalarField tt;
};
SurfaceTensor surface_hessian(const WarpedSurfaceState& s, const ScalarField& f);
ScalarField surface_laplacian(const WarpedSurfaceState& s, const ScalarField& f);
/// Total volume 2 pi int sqrt(a) w dx.
Real surface_area(const WarpedSurfaceState& s);

/// F = int (R + |grad f|^2) e^{-f} dV and
/// W = (4 pi tau)^{-1} int [tau (R + |grad f|^2) + f - 2] e^{-f} dV.
Real surface_f_functional(const WarpedSurfaceState& s, const ScalarField& f);
Real surface_w_functional(const WarpedSurfaceState& s, const ScalarField& f, Real tau);

/// Symmetric variation v = v_xx dx^2 + v_tt dtheta^2 with the scalar variation
/// h = tr_g v / 2 that keeps e^{-f} dV fixed to first order.
struct VariationField {
  ScalarField v_xx;
  ScalarField v_tt;
  ScalarField h;
};
VariationField make_variation(const WarpedSurfaceState& s, ScalarField v_xx, ScalarField v_tt);

struct VariationResidual {
  Real analytic_f = 0.0L;  // -int <v, Rc + D^2 f> dm
  Real fd_f = 0.0L;
  Real analytic_w = 0.0L;  // -tau (4 pi tau)^{-1} int <v, Rc + D^2 f - g/(2 tau)> dm
  Real fd_w = 0.0L;
  Real relative_f = 0.0L;  // |analytic - fd| / max(|analytic|, |fd|), 0 if both vanish
  Real relative_w = 0.0L;
};

/// Compares the first-variation formulas with centered differences
/// [F(g + eps v, f + eps h) - F(g - eps v, f - eps h)] / (2 eps).
VariationResidual variation_residual(const WarpedSurfaceState& s, const ScalarField& f,
                                     const VariationField& v, Real tau, Real eps = 1e-5L);

/// Pullback of (g, f) by the map x -> phi(x) with derivative phi_x:
/// a~ = a(phi) phi_x^2, w~ = w(phi), f~ = f(phi). Throws PullbackFailure if
/// phi leaves the surface.
struct SurfaceWithPotential {
  WarpedSurfaceState surface;
  ScalarField f;
};
SurfaceWithPotential pull_back(const WarpedSurfaceState& s, const ScalarField& f,
                               const std::vector<Real>& phi, const std::vector<Real>& phi_x);

/// Value of a cell-centered field at an arbitrary x (local Lagrange
/// interpolation on the continued data).
Real surface_sample(const WarpedSurfaceState& s, const std::vector<Real>& v, Parity p, Real x);

}  // namespace krf
