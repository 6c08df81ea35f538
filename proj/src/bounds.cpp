#include "krf/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "krf/geometry.hpp"

namespace krf {

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Pass: return "pass";
    case BoundStatus::Fail: return "fail";
    case BoundStatus::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

bool BoundReport::all_pass() const {
  return std::none_of(bounds.begin(), bounds.end(),
                      [](const BoundRecord& b) { return b.status == BoundStatus::Fail; });
}

const BoundRecord& BoundReport::get(const std::string& id) const {
  for (const auto& b : bounds) {
    if (b.id == id) return b;
  }
  throw Error(ErrorKind::ConfigInvalid, "no bound with id '" + id + "'");
}

namespace {

BoundRecord named(const char* id, const char* statement) {
  BoundRecord b;
  b.id = id;
  b.statement = statement;
  return b;
}

void finish(BoundRecord& b) {
  b.max_violation = -INFINITY;
  for (std::size_t k = 0; k < b.lhs.size(); ++k) {
    b.max_violation = std::max(b.max_violation, b.lhs[k] - b.rhs[k]);
  }
  if (b.lhs.empty()) b.max_violation = 0.0L;
  if (!b.hypothesis) {
    b.status = BoundStatus::NotApplicable;
  } else {
    b.status = b.max_violation <= b.tolerance ? BoundStatus::Pass : BoundStatus::Fail;
  }
}

}  // namespace

BoundReport bound_report(const FlowTrajectory& trajectory) {
  BoundReport report;
  if (trajectory.states.empty()) return report;
  const auto& first = trajectory.states.front();
  const Real n = static_cast<Real>(first.dimension());
  const Real c = trajectory.speed;
  const Real h = first.grid().spacing;
  const Real dt_max = trajectory.max_step();
  const Real budget = 10.0L * (dt_max * dt_max + h * h);

  std::vector<ScalarField> corrected;
  if (trajectory.size() >= 2) {
    corrected = gauge_track(trajectory).corrected;
  } else {
    corrected.push_back(ricci_potential(first));
  }

  const auto f0 = ricci_potential(first);
  report.sup_f0 = 0.0L;
  Real sup_f0_sq = 0.0L;
  for (Real v : f0) {
    report.sup_f0 = std::max(report.sup_f0, std::fabs(v));
    sup_f0_sq = std::max(sup_f0_sq, v * v);
  }
  report.f_bounded =
      report.sup_f0 < kBoundedFThreshold && first.asymptotics().ricci_potential_bounded;
  report.c0 = trajectory.diagnostics.front().sup_combo;
  report.bernstein_c = sup_f0_sq;
  report.c1 = 2.0L * report.bernstein_c * report.c0;
  const Real sup_abs_r0 = std::max(std::fabs(trajectory.diagnostics.front().sup_r),
                                   std::fabs(trajectory.diagnostics.front().inf_r));

  BoundRecord a = named("lower-scalar", "inf R >= -n/t");
  BoundRecord b = named("gradient-combination", "sup(2|grad f|^2 + R) <= C0");
  BoundRecord bern = named("bernstein", "sup(t|grad f|^2 + f^2) <= sup f^2(0)");
  BoundRecord d = named("decay", "sup t(|grad f|^2 + R) <= 2 C C0");
  a.tolerance = budget * std::max(1.0L, sup_abs_r0);
  b.tolerance = budget * std::max(1.0L, std::fabs(report.c0));
  bern.tolerance = budget * std::max(1.0L, report.bernstein_c);
  d.tolerance = budget * std::max(1.0L, report.c1);
  bern.hypothesis = d.hypothesis = report.f_bounded;
  if (!report.f_bounded) {
    const std::string why = "hypothesis 'f bounded' not satisfied";
    bern.note = d.note = why;
  }

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const auto& state = trajectory.states[k];
    const auto& diag = trajectory.diagnostics[k];
    const Real t = c * (state.time() - first.time());
    if (t > 0.0L) {
      a.times.push_back(state.time());
      a.lhs.push_back(-diag.inf_r);  // -inf R <= n/t
      a.rhs.push_back(n / t);
    }
    b.times.push_back(state.time());
    b.lhs.push_back(diag.sup_combo);
    b.rhs.push_back(report.c0);

    const auto f = ricci_potential(state);
    const auto grad = grad_norm_sq(state, f);
    const auto r = scalar_curvature(state);
    const auto& ft = corrected[std::min(k, corrected.size() - 1)];
    Real bern_sup = -INFINITY, decay_sup = -INFINITY;
    for (std::size_t i = 0; i < f.size(); ++i) {
      bern_sup = std::max(bern_sup, t * grad[i] + ft[i] * ft[i]);
      decay_sup = std::max(decay_sup, t * (grad[i] + r[i]));
    }
    bern.times.push_back(state.time());
    bern.lhs.push_back(bern_sup);
    bern.rhs.push_back(report.bernstein_c);
    d.times.push_back(state.time());
    d.lhs.push_back(decay_sup);
    d.rhs.push_back(report.c1);
  }
  for (auto* rec : {&a, &b, &bern, &d}) finish(*rec);
  if (d.status == BoundStatus::Pass) {
    Real worst = 0.0L;
    for (Real v : d.lhs) worst = std::max(worst, v);
    if (2.0L * worst > report.c1) {
      d.flagged = true;
      d.note = "margin below a factor 2";
    }
  }
  report.bounds = {a, b, bern, d};
  return report;
}

}  // namespace krf
