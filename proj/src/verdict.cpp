#include <algorithm>
#include <cmath>
#include <sstream>

#include "krf/scenario.hpp"

namespace krf {

namespace {

std::string fmt(Real v) {
  std::ostringstream os;
  os.precision(4);
  os << static_cast<double>(v);
  return os.str();
}

// A residual series is accepted as tending to zero when it is within
// tolerance throughout, or ends within tolerance after strictly decreasing.
bool tends_to_zero(const std::vector<Real>& series, Real tolerance) {
  if (series.empty()) return false;
  if (std::all_of(series.begin(), series.end(), [&](Real v) { return v <= tolerance; })) return true;
  if (series.size() < 2 || !(series.back() <= tolerance)) return false;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i] < series[i - 1])) return false;
  }
  return true;
}

bool strictly_decreasing(const std::vector<Real>& series) {
  if (series.size() < 2) return false;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i] <= series[i - 1])) return false;
  }
  return series.back() < series.front() * (1.0L - 1e-3L);
}

std::vector<Real> final_quartile(const FlowTrajectory& traj, const std::vector<Real>& values) {
  const Real t0 = traj.time(0);
  const Real t1 = traj.time(traj.size() - 1);
  std::vector<Real> out;
  for (std::size_t k = 0; k < traj.size() && k < values.size(); ++k) {
    if (traj.time(k) >= t0 + 0.75L * (t1 - t0)) out.push_back(values[k]);
  }
  return out;
}

}  // namespace

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Holds: return "holds";
    case HypothesisStatus::Fails: return "fails";
    case HypothesisStatus::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::FiniteTimeBlowupRicciFlatLimit: return "finite-time-blowup-ricci-flat-limit";
    case Classification::InfiniteTimeBlowupRicciFlatLimit: return "infinite-time-blowup-ricci-flat-limit";
    case Classification::GlobalWithRicciFlatLimit: return "global-with-ricci-flat-limit";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Check make_check(std::string name, Real value, Real tolerance, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.note = std::move(note);
  c.status = std::isfinite(value) ? (value <= tolerance ? CheckStatus::Pass : CheckStatus::Fail)
                                  : CheckStatus::Fail;
  return c;
}

BlowupAnalysis analyze_blowup(const FlowTrajectory& trajectory, Real window_constant) {
  BlowupAnalysis out;
  SelectionOptions options;
  options.window_constant = window_constant;
  try {
    out.entries = select_sequence(trajectory, options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoAdmissiblePoints && e.kind() != ErrorKind::TrajectoryTooShort) throw;
    out.note = e.detail();
    return out;
  }
  std::vector<RescaledFlow> flows;
  for (const auto& entry : out.entries) {
    flows.push_back(rescale_pointed(trajectory, entry, 1.0L / window_constant));
    out.base_rm.push_back(flows.back().base_rm);
    out.scalar_defect.push_back(flows.back().scalar_transform_defect);
  }
  out.limit = limit_diagnostics(flows);
  out.performed = true;
  return out;
}

Verdict verdict(const FlowTrajectory& trajectory, const VerdictInputs& in) {
  Verdict v;
  v.hypotheses = in.hypotheses;
  v.evidence = in.residuals;
  bool decay_not_applicable = false;
  if (in.bounds) {
    for (const auto& b : in.bounds->bounds) {
      v.bound_ids.push_back(b.id);
      Check c;
      c.name = "bound:" + b.id;
      c.value = b.max_violation;
      c.tolerance = b.tolerance;
      c.note = b.note;
      c.status = b.status == BoundStatus::Pass   ? CheckStatus::Pass
                 : b.status == BoundStatus::Fail ? CheckStatus::Fail
                                                 : CheckStatus::NotApplicable;
      if (b.id == "decay" && b.status == BoundStatus::NotApplicable) decay_not_applicable = true;
      v.evidence.push_back(std::move(c));
    }
  }
  auto inconclusive = [&](std::string cause) {
    v.classification = Classification::Inconclusive;
    v.cause = std::move(cause);
    return v;
  };

  std::string failed;
  for (const auto& c : v.evidence) {
    if (c.status == CheckStatus::Fail) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  if (!failed.empty()) return inconclusive("residual above tolerance: " + failed);
  if (trajectory.size() < 2) return inconclusive("trajectory too short");

  const auto& diag = trajectory.diagnostics;
  const Real rm0 = diag.front().sup_rm;
  const Real rm1 = diag.back().sup_rm;
  const bool grew = rm1 >= 2.0L * std::max(rm0, in.ricci_tolerance);

  const bool positivity = trajectory.status == EndStatus::PositivityFailure;
  if (positivity && !grew) return inconclusive("positivity failure");

  if (trajectory.status == EndStatus::BlowupDetected || positivity) {
    if (!in.blowup || !in.blowup->performed) {
      return inconclusive("finite-time blow-up signal; no rescaling sequence (" +
                          (in.blowup ? in.blowup->note : std::string("not run")) + ")");
    }
    std::vector<Real> ric;
    for (const auto& e : in.blowup->limit.entries) ric.push_back(e.ricci_residual);
    if (tends_to_zero(ric, in.ricci_tolerance)) {
      v.classification = Classification::FiniteTimeBlowupRicciFlatLimit;
      v.cause = "finite-time blow-up; rescaled sup|Ric| " + fmt(ric.back()) + " within tolerance";
      return v;
    }
    return inconclusive("finite-time blow-up; rescaled sup|Ric| " + fmt(ric.back()) +
                        " does not tend below tolerance " + fmt(in.ricci_tolerance));
  }

  std::vector<Real> rm;
  for (const auto& d : diag) rm.push_back(d.sup_rm);
  const auto rm_tail = final_quartile(trajectory, rm);
  const auto ric_tail = final_quartile(trajectory, in.sup_ricci);
  if (ric_tail.size() < 2) return inconclusive("too few stored states in the final quartile");

  bool rm_non_decreasing = true;
  for (std::size_t i = 1; i < rm_tail.size(); ++i) {
    if (rm_tail[i] < rm_tail[i - 1]) rm_non_decreasing = false;
  }
  if (grew && rm_non_decreasing) {
    if (!in.blowup || !in.blowup->performed) {
      return inconclusive("curvature grows at t_end; no rescaling sequence (" +
                          (in.blowup ? in.blowup->note : std::string("not run")) + ")");
    }
    std::vector<Real> ric;
    for (const auto& e : in.blowup->limit.entries) ric.push_back(e.ricci_residual);
    if (tends_to_zero(ric, in.ricci_tolerance)) {
      v.classification = Classification::InfiniteTimeBlowupRicciFlatLimit;
      v.cause = "curvature grows without bound; rescaled sup|Ric| decreases to " + fmt(ric.back());
      return v;
    }
    return inconclusive("curvature grows at t_end; rescaled sup|Ric| " + fmt(ric.back()) +
                        " does not decrease below tolerance");
  }

  if (std::all_of(ric_tail.begin(), ric_tail.end(), [&](Real r) { return r <= in.ricci_tolerance; })) {
    v.classification = Classification::GlobalWithRicciFlatLimit;
    v.cause = "bounded curvature; sup|Ric| within tolerance over the final quartile";
    return v;
  }
  if (strictly_decreasing(ric_tail)) {
    v.classification = Classification::GlobalWithRicciFlatLimit;
    v.cause = "bounded curvature; sup|Ric| decreases from " + fmt(ric_tail.front()) + " to " +
              fmt(ric_tail.back()) + " over the final quartile";
    return v;
  }
  const Real spread = std::fabs(ric_tail.back() - ric_tail.front()) /
                      std::max(ric_tail.front(), in.ricci_tolerance);
  if (spread < 1e-3L) {
    return inconclusive(std::string("steady profile: sup|Ric| stationary at ") + fmt(ric_tail.back()) +
                        (decay_not_applicable ? "; decay bound not applicable (f unbounded)" : ""));
  }
  return inconclusive("sup|Ric| not decreasing over the final quartile");
}

}  // namespace krf
