#pragma once

#include <string>
#include <vector>

#include "krf/radial_state.hpp"

namespace krf {

/// Potential-level flow dP/dt = c [(n-1) log P' + log P'' - n rho], i.e.
/// dg/dt = -c Ric. Speed c = 1 is the Kahler-Ricci normalization, c = 2 the
/// Riemannian one.
std::vector<Real> flow_velocity(const RadialKahlerState& state, Real speed);

/// One linearly implicit second-order Rosenbrock step (W-method with the exact
/// discrete Jacobian). The potential is shifted afterwards so that its value at
/// the first node is unchanged; this constant is invisible to the metric.
/// Throws StepRejected when the step would break P' > 0 or P'' > 0.
RadialKahlerState krf_step(const RadialKahlerState& state, Real dt, Real speed = 1.0L);

struct FlowControls {
  Real speed = 1.0L;
  Real dt_max = 1e-2L;
  Real theta_curv = 0.05L;
  int max_halvings = 40;
  Real blowup_factor = 1e3L;
  std::size_t max_steps = 200000;
};

struct StepDiagnostics {
  Real time = 0.0L;
  Real dt = 0.0L;  // step that produced this state (0 for the initial state)
  Real sup_r = 0.0L;
  Real inf_r = 0.0L;
  Real sup_grad_f = 0.0L;
  Real sup_combo = 0.0L;  // sup (2 |grad f|^2 + R)
  Real sup_rm = 0.0L;
  std::size_t rm_node = 0;
  Real sup_abs_f = 0.0L;
};

StepDiagnostics diagnose(const RadialKahlerState& state, Real dt = 0.0L);

enum class EndStatus { Completed, PositivityFailure, BlowupDetected, StepLimit };
const char* to_string(EndStatus status);

struct FlowTrajectory {
  Real speed = 1.0L;
  std::vector<RadialKahlerState> states;
  std::vector<StepDiagnostics> diagnostics;
  EndStatus status = EndStatus::Completed;
  std::string end_reason;

  std::size_t size() const { return states.size(); }
  Real time(std::size_t k) const { return states[k].time(); }
  Real max_step() const;
};

/// Wraps an externally produced sequence of states (e.g. an analytic family).
FlowTrajectory trajectory_from_states(std::vector<RadialKahlerState> states, Real speed,
                                      EndStatus status = EndStatus::Completed);

/// Adaptive driver: dt = min(dt_max, theta_curv / sup|Rm|, remaining), halved on
/// StepRejected. Never throws for numerical failure; the end status records it.
FlowTrajectory evolve(const RadialKahlerState& initial, Real t_end, const FlowControls& controls);

/// Heat-gauge potential f~ = f(0) + int_0^t c R dt' (trapezoidal in time).
struct GaugeTrack {
  std::vector<ScalarField> corrected;
  std::vector<Real> shift;          // || f~(t) - f_gauged(t) ||_inf, the size of the correction
  std::vector<Real> heat_residual;  // || (d_t - c Delta) f~ ||_inf per step (first entry 0)
  std::size_t masked_nodes = 0;     // most nodes skipped in one step for rounding noise
};
/// The heat residual skips the pole cap, the one-sided boundary nodes and
/// nodes where curvature Laplacians are dominated by rounding noise.
GaugeTrack gauge_track(const FlowTrajectory& trajectory);

/// Residuals of the scalar-curvature evolution (d_t - Delta) R = |Ric|^2 and of
/// the Bochner identity d_t |grad f|^2 = Delta |grad f|^2 - |f_ij|^2 - |Ric|^2,
/// with d_t taken by centered differences between stored states (time rescaled
/// by the speed). Pole-cap nodes, the one-sided boundary nodes and nodes
/// dominated by rounding noise (in any of the three states) are excluded.
struct EvolutionResiduals {
  std::vector<Real> times;
  std::vector<Real> scalar;
  std::vector<Real> bochner;
  std::size_t masked_nodes = 0;  // as in GaugeTrack
  Real max_scalar() const;
  Real max_bochner() const;
};
EvolutionResiduals evolution_residuals(const FlowTrajectory& trajectory);

struct BlowupCandidate {
  std::size_t step = 0;
  Real time = 0.0L;
  std::size_t node = 0;
  Real rho = 0.0L;
  Real curvature = 0.0L;  // K_j = |Rm|(x_j, t_j)
};

struct BlowupSignal {
  bool triggered = false;
  std::string cause;  // "curvature-threshold", "positivity-failure" or empty
  std::vector<BlowupCandidate> candidates;
};

/// Flags blow-up when sup|Rm| exceeds blowup_factor * max(1, sup|Rm|(0)) or the
/// trajectory ended in a positivity failure, and lists the stored times whose
/// backward window [t - 1/(C K), t] has sup|Rm| <= C K.
BlowupSignal singularity_monitor(const FlowTrajectory& trajectory, Real window_constant,
                                 Real blowup_factor = 1e3L);

}  // namespace krf
