#include "krf/flow.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "krf/curvature.hpp"
#include "krf/geometry.hpp"

namespace krf {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Velocity for arbitrary samples on the state's grid.
// Returns the offending node, or the grid size when all samples are valid.
std::size_t velocity_of(const RadialKahlerState& state, const std::vector<Real>& p, Real speed,
                        std::vector<Real>& out) {
  const auto d1 = state.ops().d1(p);
  const auto d2 = state.ops().d2(p);
  const Real tangential = static_cast<Real>(state.dimension() - 1);
  const Real n = static_cast<Real>(state.dimension());
  out.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(d1[i] > 0.0L) || !(d2[i] > 0.0L)) return i;
    out[i] = speed * (tangential * std::log(d1[i]) + std::log(d2[i]) - n * state.rho(i));
  }
  return p.size();
}

// The nodes nearest either end are not evolved by the equation; one-sided
// rows there carry growing spurious modes, scaled by the large diffusivity
// 1/(P'' h^2). Near the origin the increment k must stay regular in x = |z|^2,
// k = a + b x + c x^2 + O(x^3), which is the kernel of d^3 - 3 d^2 + 2 d in
// rho; this also pins the non-regular mode k = rho. At the far end the
// velocity of every declared far-field model is asymptotically affine in rho
// and the increment is extrapolated cubically from the four preceding nodes.
constexpr std::size_t kClosedNodes = DiffOps::kHalfWidth;
constexpr std::size_t kClosureSpan = 4;

struct ClosureRow {
  std::size_t node;
  std::size_t first;
  std::vector<Real> weights;  // row of the constraint sum_j w_j k_{first+j} = k_node
};

std::vector<ClosureRow> closure_rows(const RadialKahlerState& state) {
  std::vector<ClosureRow> rows;
  const std::size_t m = state.size();
  const Real h = state.grid().spacing;
  std::vector<Real> offsets(DiffOps::kBoundaryWidth);
  for (std::size_t j = 0; j < offsets.size(); ++j) offsets[j] = static_cast<Real>(j) * h;
  for (std::size_t i = 0; i < kClosedNodes; ++i) {
    const auto w = fornberg_weights(static_cast<Real>(i) * h, offsets, 3);
    ClosureRow row{i, 0, std::vector<Real>(offsets.size())};
    const Real self = w[3][i] - 3.0L * w[2][i] + 2.0L * w[1][i];
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      const Real c = w[3][j] - 3.0L * w[2][j] + 2.0L * w[1][j];
      row.weights[j] = j == i ? 0.0L : -c / self;
    }
    rows.push_back(std::move(row));
  }
  const std::size_t first = m - kClosedNodes - kClosureSpan;
  std::vector<Real> nodes(kClosureSpan);
  for (std::size_t j = 0; j < kClosureSpan; ++j) nodes[j] = static_cast<Real>(j);
  for (std::size_t i = m - kClosedNodes; i < m; ++i) {
    rows.push_back({i, first, fornberg_weights(static_cast<Real>(i - first), nodes, 0)[0]});
  }
  return rows;
}

// Far-end nodes whose curvature Laplacian reaches one-sided second derivatives of P.
constexpr std::size_t kFarExclusion = 3 * DiffOps::kHalfWidth;

// Residual identities involve Laplacians of curvature; nodes where their
// rounding noise exceeds this are not checked.
constexpr Real kResidualNoiseCeiling = 1e-4L;

bool unresolved(const RadialKahlerState& s, std::size_t i) {
  return s.rounding_noise(2, i) > kResidualNoiseCeiling;
}

bool is_closed(std::size_t i, std::size_t m) { return i < kClosedNodes || i + kClosedNodes >= m; }

void zero_closed(Vector& rhs) {
  const auto q = static_cast<Eigen::Index>(kClosedNodes);
  rhs.head(q).setZero();
  rhs.tail(q).setZero();
}

SparseMatrix step_matrix(const RadialKahlerState& state, Real scale) {
  // I - scale * J with J = c [(n-1) diag(1/P') D1 + diag(1/P'') D2]; `scale`
  // already contains gamma dt c. Closed rows hold the extrapolation constraint.
  const std::size_t m = state.size();
  const Real tangential = static_cast<Real>(state.dimension() - 1);
  std::vector<Eigen::Triplet<Real>> entries;
  entries.reserve(m * 9);
  for (const auto& c : closure_rows(state)) {
    const auto row = static_cast<Eigen::Index>(c.node);
    entries.emplace_back(row, row, 1.0L);
    for (std::size_t j = 0; j < c.weights.size(); ++j) {
      if (c.weights[j] != 0.0L) {
        entries.emplace_back(row, static_cast<Eigen::Index>(c.first + j), -c.weights[j]);
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (is_closed(i, m)) continue;
    const auto& r1 = state.ops().d1_row(i);
    const auto& r2 = state.ops().d2_row(i);
    const Real a = tangential / state.dpotential()[i];
    const Real b = 1.0L / state.ddpotential()[i];
    const auto row = static_cast<Eigen::Index>(i);
    entries.emplace_back(row, row, 1.0L);
    for (std::size_t k = 0; k < r1.weights.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(r1.first + k);
      entries.emplace_back(row, col, -scale * a * r1.weights[k]);
    }
    for (std::size_t k = 0; k < r2.weights.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(r2.first + k);
      entries.emplace_back(row, col, -scale * b * r2.weights[k]);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

Real sup(const ScalarField& v) { return *std::max_element(v.begin(), v.end()); }
Real inf(const ScalarField& v) { return *std::min_element(v.begin(), v.end()); }

Real sup_abs_diff(const ScalarField& a, const ScalarField& b) {
  Real out = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::fabs(a[i] - b[i]));
  return out;
}

}  // namespace

std::vector<Real> flow_velocity(const RadialKahlerState& state, Real speed) {
  std::vector<Real> out;
  velocity_of(state, state.potential(), speed, out);
  return out;
}

RadialKahlerState krf_step(const RadialKahlerState& state, Real dt, Real speed) {
  if (!(dt > 0.0L)) throw Error(ErrorKind::StepRejected, "time step must be positive");
  const Real gamma = 1.0L + 1.0L / std::sqrt(2.0L);
  const std::size_t m = state.size();
  const auto& p = state.potential();

  std::vector<Real> f0;
  velocity_of(state, p, speed, f0);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(step_matrix(state, gamma * dt * speed));
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::StepRejected, "step matrix is singular");
  }
  Vector rhs = Eigen::Map<const Vector>(f0.data(), static_cast<Eigen::Index>(m));
  zero_closed(rhs);
  const Vector k1 = lu.solve(rhs);

  std::vector<Real> stage(m);
  for (std::size_t i = 0; i < m; ++i) stage[i] = p[i] + dt * k1(static_cast<Eigen::Index>(i));
  std::vector<Real> f1;
  if (const auto bad = velocity_of(state, stage, speed, f1); bad < m) {
    throw Error(ErrorKind::StepRejected, "intermediate stage lost metric positivity at rho=" +
                                             std::to_string(static_cast<double>(state.rho(bad))));
  }
  rhs = Eigen::Map<const Vector>(f1.data(), static_cast<Eigen::Index>(m)) - 2.0L * k1;
  zero_closed(rhs);
  const Vector k2 = lu.solve(rhs);

  std::vector<Real> next(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    next[i] = p[i] + dt * (1.5L * k1(ii) + 0.5L * k2(ii));
  }
  const Real shift = next[0] - p[0];
  for (auto& v : next) v -= shift;
  try {
    return state.with_potential(std::move(next), state.time() + dt);
  } catch (const Error& e) {
    throw Error(ErrorKind::StepRejected, e.what());
  }
}

StepDiagnostics diagnose(const RadialKahlerState& state, Real dt) {
  StepDiagnostics d;
  d.time = state.time();
  d.dt = dt;
  const auto f = ricci_potential(state);
  const auto r = scalar_curvature(state);
  const auto g = grad_norm_sq(state, f);
  const auto rm = curvature_norm(state);
  d.sup_r = sup(r);
  d.inf_r = inf(r);
  d.sup_grad_f = sup(g);
  d.sup_combo = 2.0L * g[0] + r[0];
  for (std::size_t i = 0; i < r.size(); ++i) d.sup_combo = std::max(d.sup_combo, 2.0L * g[i] + r[i]);
  const auto it = std::max_element(rm.begin(), rm.end());
  d.sup_rm = *it;
  d.rm_node = static_cast<std::size_t>(it - rm.begin());
  for (Real v : f) d.sup_abs_f = std::max(d.sup_abs_f, std::fabs(v));
  return d;
}

const char* to_string(EndStatus status) {
  switch (status) {
    case EndStatus::Completed: return "completed";
    case EndStatus::PositivityFailure: return "positivity-failure";
    case EndStatus::BlowupDetected: return "blowup-detected";
    case EndStatus::StepLimit: return "step-limit";
  }
  return "unknown";
}

Real FlowTrajectory::max_step() const {
  Real out = 0.0L;
  for (const auto& d : diagnostics) out = std::max(out, d.dt);
  return out;
}

FlowTrajectory trajectory_from_states(std::vector<RadialKahlerState> states, Real speed,
                                      EndStatus status) {
  FlowTrajectory traj;
  traj.speed = speed;
  traj.status = status;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Real dt = k == 0 ? 0.0L : states[k].time() - states[k - 1].time();
    traj.diagnostics.push_back(diagnose(states[k], dt));
  }
  traj.states = std::move(states);
  return traj;
}

FlowTrajectory evolve(const RadialKahlerState& initial, Real t_end, const FlowControls& controls) {
  FlowTrajectory traj;
  traj.speed = controls.speed;
  traj.states.push_back(initial);
  traj.diagnostics.push_back(diagnose(initial));
  const Real rm0 = traj.diagnostics.front().sup_rm;
  const Real trigger = controls.blowup_factor * std::max(1.0L, rm0);
  const Real t_start = initial.time();
  const Real finish = t_start + t_end;

  std::size_t steps = 0;
  while (traj.states.back().time() < finish - 1e-15L * std::max(1.0L, finish)) {
    if (steps >= controls.max_steps) {
      traj.status = EndStatus::StepLimit;
      traj.end_reason = "step budget exhausted";
      return traj;
    }
    const auto& current = traj.states.back();
    const Real rm = traj.diagnostics.back().sup_rm;
    Real dt = controls.dt_max;
    if (rm > 0.0L) dt = std::min(dt, controls.theta_curv / rm);
    dt = std::min(dt, finish - current.time());

    bool accepted = false;
    for (int halving = 0; halving <= controls.max_halvings; ++halving) {
      try {
        auto next = krf_step(current, dt, controls.speed);
        traj.diagnostics.push_back(diagnose(next, dt));
        traj.states.push_back(std::move(next));
        accepted = true;
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::StepRejected) throw;
        traj.end_reason = e.what();
        dt *= 0.5L;
      }
    }
    if (!accepted) {
      traj.status = EndStatus::PositivityFailure;
      return traj;
    }
    traj.end_reason.clear();
    ++steps;
    if (traj.diagnostics.back().sup_rm > trigger) {
      traj.status = EndStatus::BlowupDetected;
      traj.end_reason = "sup|Rm| exceeded the blow-up threshold";
      return traj;
    }
  }
  traj.status = EndStatus::Completed;
  return traj;
}

GaugeTrack gauge_track(const FlowTrajectory& trajectory) {
  if (trajectory.size() < 2) {
    throw Error(ErrorKind::TrajectoryTooShort, "gauge tracking needs at least two states");
  }
  const Real c = trajectory.speed;
  GaugeTrack out;
  ScalarField prev_r = scalar_curvature(trajectory.states[0]);
  ScalarField prev_lap;
  out.corrected.push_back(ricci_potential(trajectory.states[0]));
  out.shift.push_back(0.0L);
  out.heat_residual.push_back(0.0L);
  prev_lap = laplacian(trajectory.states[0], out.corrected.back());
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const auto& state = trajectory.states[k];
    const Real dt = state.time() - trajectory.states[k - 1].time();
    const auto r = scalar_curvature(state);
    ScalarField next = out.corrected.back();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += 0.5L * c * dt * (prev_r[i] + r[i]);
    out.shift.push_back(sup_abs_diff(next, ricci_potential(state)));
    const auto lap = laplacian(state, next);
    Real worst = 0.0L;
    std::size_t masked = 0;
    for (std::size_t i = state.cap_index(2); i + kFarExclusion < next.size(); ++i) {
      if (unresolved(state, i) || unresolved(trajectory.states[k - 1], i)) {
        ++masked;
        continue;
      }
      const Real dfdt = (next[i] - out.corrected.back()[i]) / dt;
      worst = std::max(worst, std::fabs(dfdt - 0.5L * c * (lap[i] + prev_lap[i])));
    }
    out.heat_residual.push_back(worst);
    out.masked_nodes = std::max(out.masked_nodes, masked);
    out.corrected.push_back(std::move(next));
    prev_r = r;
    prev_lap = lap;
  }
  return out;
}

Real EvolutionResiduals::max_scalar() const {
  return scalar.empty() ? 0.0L : *std::max_element(scalar.begin(), scalar.end());
}

Real EvolutionResiduals::max_bochner() const {
  return bochner.empty() ? 0.0L : *std::max_element(bochner.begin(), bochner.end());
}

EvolutionResiduals evolution_residuals(const FlowTrajectory& trajectory) {
  if (trajectory.size() < 3) {
    throw Error(ErrorKind::TrajectoryTooShort, "evolution residuals need at least three states");
  }
  struct Fields {
    ScalarField r, grad, lap_r, lap_grad, hess, ric;
  };
  auto fields_of = [](const RadialKahlerState& s) {
    Fields out;
    const auto f = ricci_potential(s);
    out.r = scalar_curvature(s);
    out.grad = grad_norm_sq(s, f);
    out.lap_r = laplacian(s, out.r, 2);
    out.lap_grad = laplacian(s, out.grad, 2);
    out.hess = hessian20_norm_sq(s, f);
    out.ric = ricci_norm_sq(s);
    return out;
  };
  const Real c = trajectory.speed;
  EvolutionResiduals res;
  Fields prev = fields_of(trajectory.states[0]);
  Fields cur = fields_of(trajectory.states[1]);
  for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
    Fields next = fields_of(trajectory.states[k + 1]);
    const auto& s = trajectory.states[k];
    const Real h1 = s.time() - trajectory.states[k - 1].time();
    const Real h2 = trajectory.states[k + 1].time() - s.time();
    const Real wm = -h2 / (h1 * (h1 + h2));
    const Real w0 = (h2 - h1) / (h1 * h2);
    const Real wp = h1 / (h2 * (h1 + h2));
    const std::size_t lo = s.cap_index(2);
    const std::size_t hi = s.size() - kFarExclusion;
    Real worst_r = 0.0L, worst_b = 0.0L;
    std::size_t masked = 0;
    const auto& sp = trajectory.states[k - 1];
    const auto& sn = trajectory.states[k + 1];
    for (std::size_t i = lo; i < hi; ++i) {
      if (unresolved(sp, i) || unresolved(s, i) || unresolved(sn, i)) {
        ++masked;
        continue;
      }
      const Real dr = (wm * prev.r[i] + w0 * cur.r[i] + wp * next.r[i]) / c;
      const Real dg = (wm * prev.grad[i] + w0 * cur.grad[i] + wp * next.grad[i]) / c;
      worst_r = std::max(worst_r, std::fabs(dr - cur.lap_r[i] - cur.ric[i]));
      worst_b = std::max(worst_b, std::fabs(dg - cur.lap_grad[i] + cur.hess[i] + cur.ric[i]));
    }
    res.times.push_back(s.time());
    res.scalar.push_back(worst_r);
    res.bochner.push_back(worst_b);
    res.masked_nodes = std::max(res.masked_nodes, masked);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return res;
}

BlowupSignal singularity_monitor(const FlowTrajectory& trajectory, Real window_constant,
                                 Real blowup_factor) {
  BlowupSignal signal;
  if (trajectory.diagnostics.empty()) return signal;
  const Real rm0 = trajectory.diagnostics.front().sup_rm;
  const Real trigger = blowup_factor * std::max(1.0L, rm0);
  for (const auto& d : trajectory.diagnostics) {
    if (d.sup_rm > trigger) {
      signal.triggered = true;
      signal.cause = "curvature-threshold";
      break;
    }
  }
  if (!signal.triggered && trajectory.status == EndStatus::PositivityFailure) {
    signal.triggered = true;
    signal.cause = "positivity-failure";
  }
  if (!signal.triggered) return signal;

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto& d = trajectory.diagnostics[k];
    if (!(d.sup_rm > 0.0L)) continue;
    const Real window_start = d.time - 1.0L / (window_constant * d.sup_rm);
    Real window_sup = 0.0L;
    for (std::size_t j = 0; j <= k; ++j) {
      if (trajectory.diagnostics[j].time >= window_start) {
        window_sup = std::max(window_sup, trajectory.diagnostics[j].sup_rm);
      }
    }
    if (window_sup <= window_constant * d.sup_rm) {
      signal.candidates.push_back(
          {k, d.time, d.rm_node, trajectory.states[k].rho(d.rm_node), d.sup_rm});
    }
  }
  return signal;
}

}  // namespace krf
