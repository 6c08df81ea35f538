#pragma once

#include <string>
#include <vector>

#include "krf/flow.hpp"

namespace krf {

enum class BoundStatus { Pass, Fail, NotApplicable };
const char* to_string(BoundStatus status);

struct BoundRecord {
  std::string id;
  std::string statement;
  bool hypothesis = true;
  BoundStatus status = BoundStatus::Pass;
  std::vector<Real> times;
  std::vector<Real> lhs;
  std::vector<Real> rhs;
  Real max_violation = 0.0L;  // max(lhs - rhs), may be negative
  Real tolerance = 0.0L;
  bool flagged = false;  // passes, but with less than a factor 2 of margin
  std::string note;
};

/// Maximum-principle bounds along a trajectory, with time measured as c t:
///   (a) inf R >= -n / t
///   (b) sup (2|grad f|^2 + R) <= C0 = sup (2|grad f|^2 + R)(0)
///   (c) sup (t |grad f|^2 + f~^2) <= sup f~^2(0)       [f bounded]
///   (d) sup t (|grad f|^2 + R) <= 2 C C0, C = sup f~^2(0)  [f bounded]
/// f~ is the heat-gauge potential from gauge_track. The hypothesis "f bounded"
/// requires sup|f(0)| < threshold and a bounded declared far field.
struct BoundReport {
  std::vector<BoundRecord> bounds;
  Real c0 = 0.0L;
  Real bernstein_c = 0.0L;
  Real c1 = 0.0L;  // 2 C C0
  Real sup_f0 = 0.0L;
  bool f_bounded = false;

  bool all_pass() const;
  const BoundRecord& get(const std::string& id) const;
};

inline constexpr Real kBoundedFThreshold = 1e3L;

BoundReport bound_report(const FlowTrajectory& trajectory);

}  // namespace krf
