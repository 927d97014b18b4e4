#pragma once

#include <stdexcept>
#include <string>

namespace flowdeg {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed operator data: non-square matrix, non-SPD weight, bad file.
class OperatorError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument outside an operation's stated domain (t < 0, empty
/// region, non-positive step count, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Resolvent system numerically singular (reciprocal condition < 1e-12).
class SingularResolventError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration: unparsable file, violated stability guard,
/// unknown preset, inconsistent dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Trajectory norm exceeded the blow-up threshold before the horizon.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time)
      : Error(what), time_(time) {}
  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Step refinement hit the cap without meeting the residual tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

/// Field too small somewhere on the region boundary: the degree is not
/// defined (or not computable) for this region.
class InadmissibleFieldError : public Error {
 public:
  using Error::Error;
};

/// Limit schedule did not stabilize (condensing-limit degree).
class LimitUnstableError : public Error {
 public:
  using Error::Error;
};

/// Zero-sum and boundary cross-check disagree (low-dimensional degrees).
class CrossCheckError : public Error {
 public:
  using Error::Error;
};

/// Degree certificate absent or zero where a nonzero one is required.
class NoCertificateError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to reach its target defect.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_defect)
      : Error(what), best_defect_(best_defect) {}
  [[nodiscard]] double best_defect() const noexcept { return best_defect_; }

 private:
  double best_defect_;
};

/// Structural hypothesis violated at construction time (named inequality).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace flowdeg
