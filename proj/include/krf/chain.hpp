#pragma once

#include <limits>
#include <vector>

#include "krf/surface.hpp"

namespace krf {

struct ChainControls {
  Real tau = 2.0L;        // infinity reduces the chain to plain Ricci flow
  Real s_end = 0.25L;     // must stay below tau
  std::size_t samples = 25;
  Real cfl = 0.2L;        // RK4 step = cfl * h^2 * min a
  /// The potential equation is backward parabolic, so forward integration
  /// amplifies grid-scale modes at rate ~ 1/h^2. f is kept in the span of the
  /// first `potential_modes` cosine modes in x.
  std::size_t potential_modes = 8;
};

/// Gradient flow of W on a warped surface (time t, real dimension 2):
///   g_t = -2 (Rc + D^2 f - g/(2 tau)),  f_t = -Delta f - R + 1/tau,
/// pulled back by the flow of grad f to g-bar (g-bar_t = -2 (Rc - g-bar/(2 tau)))
/// and rescaled to g-check(s) = C(s) g-bar(t(s)), C = 1 - s/tau, t = -tau log C,
/// which should satisfy d_s g-check = -2 Rc(g-check).
/// Residuals are g-norms, sup over cells, with centered differences between
/// samples (interior samples only; the endpoints carry 0).
struct ChainReport {
  Real tau = 0.0L;
  Real h = 0.0L;
  Real ds = 0.0L;
  std::vector<Real> s;
  std::vector<Real> t;
  std::vector<Real> scale;             // C(s)
  std::vector<Real> bar_residual;      // |d_t g-bar + 2 (Rc(g-bar) - g-bar/(2 tau))|
  std::vector<Real> check_residual;    // |d_s g-check + 2 Rc(g-check)|
  std::vector<Real> potential_residual;  // f-check equation with n/(2 tau C(s))
  std::vector<Real> w_defect;          // |W(g-bar, f-bar, tau) - W(g, f, tau)|
  std::vector<WarpedSurfaceState> checked;
  std::vector<ScalarField> checked_potential;
  Real max_bar() const;
  Real max_check() const;
  Real max_potential() const;
  Real max_w_defect() const;
};

/// Throws ChainDomainExceeded when s_end >= tau and PullbackFailure when the
/// gradient flow map leaves the surface.
ChainReport modified_flow_chain(const WarpedSurfaceState& initial, const ScalarField& f0,
                                const ChainControls& controls);

}  // namespace krf
