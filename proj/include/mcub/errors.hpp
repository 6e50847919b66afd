#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace mcub {

/// Base class for every failure the library reports as a first-class result.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  /// Short machine-readable identifier, e.g. "NotAFrame".
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

#define MCUB_DEFINE_ERROR(Type)                                              \
  class Type : public Error {                                                \
  public:                                                                    \
    explicit Type(const std::string& what) : Error(#Type, what) {}           \
  }

MCUB_DEFINE_ERROR(RhoTooLarge);
MCUB_DEFINE_ERROR(NotALattice);
MCUB_DEFINE_ERROR(NotAFrame);
MCUB_DEFINE_ERROR(CutoffExceeded);
MCUB_DEFINE_ERROR(TruncationTooSmall);
MCUB_DEFINE_ERROR(InsufficientExactness);
MCUB_DEFINE_ERROR(UnsupportedManifold);
MCUB_DEFINE_ERROR(LengthMismatch);
MCUB_DEFINE_ERROR(FormatError);

#undef MCUB_DEFINE_ERROR

/// Raised when the corrected weights are not all strictly positive. Carries
/// the offending weight vector for diagnosis.
class PositivityFailed : public Error {
public:
  PositivityFailed(const std::string& what, Eigen::VectorXd weights)
      : Error("PositivityFailed", what), weights_(std::move(weights)) {}

  const Eigen::VectorXd& weights() const noexcept { return weights_; }

private:
  Eigen::VectorXd weights_;
};

}  // namespace mcub
