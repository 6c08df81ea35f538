#include "krf/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krf/curvature.hpp"
#include "krf/geometry.hpp"
#include "krf/stencil.hpp"

namespace krf {

namespace {

constexpr Real kTimeSlack = 1e-12L;

// Degree-5 Lagrange interpolation on the 6 nodes nearest to x (xs increasing).
// NaN outside [xs.front(), xs.back()].
Real interpolate_nonuniform(const std::vector<Real>& xs, const std::vector<Real>& ys, Real x) {
  if (xs.size() < 6 || x < xs.front() || x > xs.back()) return std::numeric_limits<Real>::quiet_NaN();
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t start = std::min(hi >= 3 ? hi - 3 : 0, xs.size() - 6);
  const std::span<const Real> window(xs.data() + start, 6);
  const auto w = fornberg_weights(x, window, 0)[0];
  Real out = 0.0L;
  for (std::size_t i = 0; i < 6; ++i) out += w[i] * ys[start + i];
  return out;
}

}  // namespace

std::vector<BlowupEntry> select_sequence(const FlowTrajectory& trajectory,
                                         const SelectionOptions& options) {
  if (!(options.window_constant > 0.0L) || !(options.ratio > 1.0L)) {
    throw Error(ErrorKind::ConfigInvalid, "window constant must be positive and ratio above 1");
  }
  const auto& diag = trajectory.diagnostics;
  if (diag.size() < 2) throw Error(ErrorKind::TrajectoryTooShort, "need at least two stored states");
  const Real t0 = diag.front().time;
  const Real c = options.window_constant;

  std::vector<BlowupEntry> out;
  for (std::size_t k = 0; k < diag.size() && out.size() < options.max_entries; ++k) {
    const Real kk = diag[k].sup_rm;
    if (!(kk > 0.0L) || !std::isfinite(kk)) continue;
    if (!out.empty() && kk < options.ratio * out.back().curvature) continue;
    const Real start = diag[k].time - 1.0L / (c * kk);
    if (start < t0 - kTimeSlack) continue;
    Real window_sup = 0.0L;
    for (std::size_t j = 0; j <= k; ++j) {
      if (diag[j].time >= start - kTimeSlack) window_sup = std::max(window_sup, diag[j].sup_rm);
    }
    if (window_sup > c * kk) continue;
    BlowupEntry e;
    e.step = k;
    e.time = diag[k].time;
    e.node = diag[k].rm_node;
    e.rho = trajectory.states[k].rho(e.node);
    e.curvature = kk;
    e.window_start = start;
    e.window_sup = window_sup;
    out.push_back(e);
  }
  if (out.size() < 2) {
    throw Error(ErrorKind::NoAdmissiblePoints,
                "curvature does not grow by the required ratio through admissible windows");
  }
  return out;
}

RescaledFlow rescale_pointed(const FlowTrajectory& trajectory, const BlowupEntry& entry,
                             Real backward, Real forward) {
  if (entry.step >= trajectory.size()) throw Error(ErrorKind::WindowOutOfRange, "entry step beyond trajectory");
  if (!(backward >= 0.0L) || !(forward >= 0.0L)) {
    throw Error(ErrorKind::ConfigInvalid, "window lengths must be non-negative");
  }
  const Real k = entry.curvature;
  const Real t0 = trajectory.time(0);
  if (entry.time - backward / k < t0 - kTimeSlack) {
    throw Error(ErrorKind::WindowOutOfRange, "backward window starts before the trajectory");
  }
  if (entry.time + forward / k > trajectory.time(trajectory.size() - 1) + kTimeSlack) {
    throw Error(ErrorKind::WindowOutOfRange, "forward window ends after the trajectory");
  }

  RescaledFlow out;
  out.entry = entry;
  Real worst = 0.0L;
  for (std::size_t l = 0; l < trajectory.size(); ++l) {
    const auto& g = trajectory.states[l];
    const Real s = k * (g.time() - entry.time);
    if (s < -backward - kTimeSlack || s > forward + kTimeSlack) continue;
    auto gj = g.rescaled(k, s);
    const auto r = scalar_curvature(g);
    const auto rj = scalar_curvature(gj);
    Real scale = 1.0L;
    for (Real v : r) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::fabs(k * rj[i] - r[i]) / scale);
    if (l == entry.step) {
      out.base_index = out.states.size();
      out.base_rm = curvature_norm(gj)[entry.node];
    }
    out.states.push_back(std::move(gj));
  }
  out.scalar_transform_defect = worst;
  return out;
}

PointedProfile pointed_profile(const RescaledFlow& flow, Real sigma_max) {
  const auto& g = flow.states.at(flow.base_index);
  const auto d = radial_distance(g);
  const Real base = d[flow.entry.node];
  PointedProfile out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Real sigma = d[i] - base;
    if (std::fabs(sigma) > sigma_max) continue;
    out.sigma.push_back(sigma);
    out.fiber.push_back(std::sqrt(2.0L * g.ddpotential()[i]));
    out.base.push_back(std::sqrt(2.0L * g.dpotential()[i]));
  }
  return out;
}

LimitDiagnostics limit_diagnostics(const std::vector<RescaledFlow>& sequence, Real sigma_max) {
  LimitDiagnostics out;
  std::vector<PointedProfile> profiles;
  for (const auto& flow : sequence) {
    EntryDiagnostics e;
    e.curvature = flow.entry.curvature;
    for (const auto& g : flow.states) {
      const auto rm = curvature_norm(g);
      const auto r = scalar_curvature(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        e.sup_rm = std::max(e.sup_rm, rm[i]);
        e.scalar_residual = std::max(e.scalar_residual, std::fabs(r[i]));
      }
    }
    const auto& g0 = flow.states.at(flow.base_index);
    const auto d = radial_distance(g0);
    const auto vol = ball_volume(g0);
    const Real base = d[flow.entry.node];
    const Real radius = 1.0L + base;
    const Real v = interpolate_nonuniform(d, vol, radius);
    e.collapse_ratio = v / std::pow(radius, 2 * g0.dimension());
    const auto ric = ricci_eigenvalues(g0);
    for (std::size_t i = 0; i < g0.size(); ++i) {
      if (std::fabs(d[i] - base) > sigma_max) continue;
      e.ricci_residual =
          std::max({e.ricci_residual, std::fabs(ric.radial[i]), std::fabs(ric.tangential[i])});
    }
    out.uniform_rm_bound = std::max(out.uniform_rm_bound, e.sup_rm);
    out.entries.push_back(e);
    profiles.push_back(pointed_profile(flow, sigma_max));
  }

  for (std::size_t j = 1; j < profiles.size(); ++j) {
    const auto& p = profiles[j - 1];
    const auto& q = profiles[j];
    Real dist = std::numeric_limits<Real>::quiet_NaN();
    if (p.sigma.size() >= 6 && q.sigma.size() >= 6) {
      const Real lo = std::max(p.sigma.front(), q.sigma.front());
      const Real hi = std::min(p.sigma.back(), q.sigma.back());
      if (hi > lo) {
        dist = 0.0L;
        constexpr int kSamples = 401;
        for (int i = 0; i < kSamples; ++i) {
          const Real x = lo + (hi - lo) * static_cast<Real>(i) / (kSamples - 1);
          dist = std::max({dist,
                           std::fabs(interpolate_nonuniform(p.sigma, p.fiber, x) -
                                     interpolate_nonuniform(q.sigma, q.fiber, x)),
                           std::fabs(interpolate_nonuniform(p.sigma, p.base, x) -
                                     interpolate_nonuniform(q.sigma, q.base, x))});
        }
      }
    }
    out.profile_distance.push_back(dist);
  }

  out.ricci_residual_decreasing = out.entries.size() >= 2;
  for (std::size_t j = 1; j < out.entries.size(); ++j) {
    if (!(out.entries[j].ricci_residual < out.entries[j - 1].ricci_residual)) {
      out.ricci_residual_decreasing = false;
    }
  }
  return out;
}

}  // namespace krf
