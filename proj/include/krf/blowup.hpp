#pragma once

#include <vector>

#include "krf/flow.hpp"

namespace krf {

struct SelectionOptions {
  Real window_constant = 2.0L;  // C: sup|Rm| <= C K_j on [t_j - 1/(C K_j), t_j]
  Real ratio = 2.0L;            // K_{j+1} >= ratio * K_j
  std::size_t max_entries = 8;
};

/// A point (x_j, t_j) with K_j = |Rm|(x_j, t_j) = sup|Rm|(t_j).
struct BlowupEntry {
  std::size_t step = 0;
  Real time = 0.0L;
  std::size_t node = 0;
  Real rho = 0.0L;
  Real curvature = 0.0L;
  Real window_start = 0.0L;
  Real window_sup = 0.0L;  // sup|Rm| over stored states in the backward window
};

/// Greedy selection over stored steps: an entry is accepted when its backward
/// window lies inside the trajectory, satisfies the window condition, and its
/// curvature is at least `ratio` times the previous entry's. Throws
/// NoAdmissiblePoints when fewer than two entries qualify.
std::vector<BlowupEntry> select_sequence(const FlowTrajectory& trajectory,
                                         const SelectionOptions& options = {});

/// g_j(s) = K_j g(t_j + s / K_j), stored as potentials K_j P.
struct RescaledFlow {
  BlowupEntry entry;
  std::vector<RadialKahlerState> states;  // time() is the rescaled time s
  std::size_t base_index = 0;             // the state at s = 0
  Real base_rm = 0.0L;                    // |Rm(g_j(0))| at the base point
  /// max over states and nodes of |K_j R(g_j) - R(g)| / max(1, sup|R(g)|).
  Real scalar_transform_defect = 0.0L;
};

/// Keeps stored states with s in [-backward, forward]. Throws
/// WindowOutOfRange when the backward window starts before the trajectory.
RescaledFlow rescale_pointed(const FlowTrajectory& trajectory, const BlowupEntry& entry,
                             Real backward = 0.5L, Real forward = 0.0L);

/// Fiber and base radii of g_j(0) against signed arclength sigma from the base point.
struct PointedProfile {
  std::vector<Real> sigma;
  std::vector<Real> fiber;  // sqrt(2 P'')
  std::vector<Real> base;   // sqrt(2 P')
};
PointedProfile pointed_profile(const RescaledFlow& flow, Real sigma_max = 10.0L);

struct EntryDiagnostics {
  Real curvature = 0.0L;
  Real sup_rm = 0.0L;          // over the rescaled window
  Real collapse_ratio = 0.0L;  // Vol(B(o, 1 + d)) / (1 + d)^{2n}, d = distance of the base point
  Real ricci_residual = 0.0L;  // sup |Ric(g_j(0))| within |sigma| <= sigma_max
  Real scalar_residual = 0.0L; // sup |R(g_j)| over the window
};

struct LimitDiagnostics {
  std::vector<EntryDiagnostics> entries;
  std::vector<Real> profile_distance;  // between consecutive entries, |sigma| <= sigma_max
  Real uniform_rm_bound = 0.0L;
  bool ricci_residual_decreasing = false;
};

LimitDiagnostics limit_diagnostics(const std::vector<RescaledFlow>& sequence,
                                   Real sigma_max = 10.0L);

}  // namespace krf
