#pragma once

#include <string>
#include <vector>

#include "krf/flow.hpp"

namespace krf {

/// Which formula evaluates W. All three agree on the same data:
///   Riemannian: (4 pi tau)^{-m/2} int [tau (R_g + |grad f|_g^2) + f - m] e^{-f} dV, m = 2n,
///               with Riemannian R_g = 2R and |grad f|_g^2 = 2|grad f|^2,
///   Kahler:     (4 pi tau)^{-n} int [2 tau (R + |grad f|^2) + f - 2n] e^{-f} dV,
///   UForm:      (4 pi tau)^{-n} int [2 tau (R u^2 + 4|grad u|^2) - u^2 log u^2 - 2n u^2] dV.
enum class WNormalization { Riemannian, Kahler, UForm };
const char* to_string(WNormalization normalization);

struct FunctionalOptions {
  /// NonIntegrable when |integrand| at the last node exceeds this fraction of
  /// its maximum over the grid.
  Real decay_threshold = 1e-6L;
};

/// F = int (R_g + |grad f|_g^2) e^{-f} dV over the grid (Riemannian normalization).
Real f_functional(const RadialKahlerState& state, const ScalarField& f,
                  const FunctionalOptions& options = {});

/// W for a potential f; UForm substitutes u = e^{-f/2}.
Real w_functional(const RadialKahlerState& state, const ScalarField& f, Real tau,
                  WNormalization normalization = WNormalization::Kahler,
                  const FunctionalOptions& options = {});

/// A density u >= 0 vanishing from `cutoff` on, normalized so that
/// (4 pi tau)^{-n} int u^2 dV = 1.
struct TestDensity {
  std::vector<Real> u;
  Real tau = 1.0L;
  std::size_t cutoff = 0;
};

/// Normalizes u (zeroing it from `cutoff` on). Throws NormalizationViolated
/// for zero mass and ConfigInvalid when the support reaches the last node.
TestDensity make_density(const RadialKahlerState& state, std::vector<Real> u, Real tau,
                         std::size_t cutoff);
Real density_mass(const RadialKahlerState& state, const TestDensity& density);

/// First node whose distance from the origin exceeds the largest distance
/// at which a density may be supported (kept clear of the one-sided rows).
std::size_t density_cutoff(const RadialKahlerState& state);

/// Gaussian e^{-d^2/(8 tau)} in the Riemannian distance d from the origin
/// (so u^2 has variance 2 tau), truncated and normalized.
TestDensity gaussian_density(const RadialKahlerState& state, Real tau);

/// u-form W. Throws NormalizationViolated if the mass differs from 1 by more than 1e-10.
Real w_functional(const RadialKahlerState& state, const TestDensity& density);

struct MinimizerControls {
  std::size_t max_iterations = 5000;
  Real gradient_tolerance = 1e-6L;
  /// Seeds are Gaussians of variance 2 tau times these factors; the best
  /// result (lowest W, then lowest gradient norm) wins.
  std::vector<Real> seed_widths = {1.0L};
};

struct MuResult {
  Real mu = 0.0L;
  TestDensity minimizer;
  Real gradient_norm = 0.0L;
  std::size_t iterations = 0;
  bool converged = false;
  /// W of every accepted iterate, non-increasing; mu never exceeds any of them.
  std::vector<Real> history;
};

/// mu(g, tau) = inf W over normalized densities: Sobolev-preconditioned
/// projected gradient descent with Armijo backtracking. Requires the
/// truncation radius to be at least 6 sqrt(tau) (ConfigInvalid otherwise).
/// Non-convergence is reported in the result, not thrown.
MuResult mu_minimize(const RadialKahlerState& state, Real tau,
                     const MinimizerControls& controls = {});

enum class MonotonicityMode { Fixed, Shifted };

struct MonotonicitySeries {
  MonotonicityMode mode = MonotonicityMode::Shifted;
  std::vector<Real> times;
  std::vector<Real> taus;
  std::vector<Real> mu;
  std::vector<bool> sample_converged;
  Real worst_rate = 0.0L;  // min over steps of (mu_{k+1} - mu_k) / (t_{k+1} - t_k)
  bool non_decreasing = true;
};

/// mu(g(t), tau(t)) at every `stride`-th stored time, tau = tau0 (Fixed) or
/// tau0 - (c/2)(t - t0) (Shifted, requires tau0 to exceed the decrease). Non-decrease is
/// judged with slack `tolerance` per unit time. Samples run concurrently.
MonotonicitySeries mu_monotonicity(const FlowTrajectory& trajectory, Real tau0,
                                   MonotonicityMode mode, Real tolerance = 1e-4L,
                                   std::size_t stride = 1,
                                   const MinimizerControls& controls = {});

struct CollapseRatio {
  Real radius = 0.0L;
  Real volume = 0.0L;
  Real kappa = 0.0L;       // Vol(B(r)) / r^{2n}
  Real sup_rm = 0.0L;      // sup of |Rm| over B(r)
  bool admissible = false; // sup |Rm| <= r^{-2}
};

struct ProbeReport {
  /// Best constant C in (int |u|^{2n/(n-1)})^{(n-1)/n} <= C int (|grad u|_g^2 + u^2)
  /// over radial densities; NaN for n = 1, where the exponent is infinite.
  Real sobolev_constant = 0.0L;
  std::vector<CollapseRatio> collapse;
};

/// Ball radii beyond the grid throw ConfigInvalid. Zero Sobolev iterations
/// skip the Sobolev probe (reported as NaN).
ProbeReport inequality_probes(const RadialKahlerState& state, const std::vector<Real>& radii,
                              std::size_t sobolev_iterations = 200);

struct EntropyReport {
  Real tau = 1.0L;
  Real f_value = 0.0L;
  Real w_riemannian = 0.0L;
  Real w_kahler = 0.0L;
  Real w_uform = 0.0L;
  MuResult mu;
  ProbeReport probes;
};

/// F and W for the state's own Ricci potential, mu at tau, and the probes.
EntropyReport entropy_report(const RadialKahlerState& state, Real tau,
                             const std::vector<Real>& radii,
                             const MinimizerControls& controls = {});

}  // namespace krf
