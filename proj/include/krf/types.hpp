#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace krf {

// Extended precision is required: scalar curvature is a fourth derivative
// of the stored potential, so double rounding on P is amplified by h^-4.
using Real = long double;

enum class ErrorKind {
  MetricDegenerate,
  GridTooCoarse,
  GridNotUniform,
  GridMismatch,
  BoundaryNode,
  DimensionTooSmall,
  NonHermitian,
  StepRejected,
  TrajectoryTooShort,
  NonIntegrable,
  NormalizationViolated,
  NotConverged,
  ChainDomainExceeded,
  PullbackFailure,
  NoAdmissiblePoints,
  WindowOutOfRange,
  ConfigInvalid,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Samples of a radial function on the grid of the state it was derived from.
using ScalarField = std::vector<Real>;

}  // namespace krf
