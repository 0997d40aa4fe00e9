#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bomca {

/// Failure categories surfaced by the engine. Trajectory-level kinds are
/// recoverable at the manifold layer (the sample is marked dead); the rest
/// abort the operation that raised them.
enum class ErrorKind {
  InvalidArgument,
  PoleProximity,
  StepLimitExceeded,
  Blowup,
  SeedNotFound,
  DeadRegion,
  ManifoldStall,
  LandingFailed,
  InsufficientCoverage,
  NonMonotonicArrivals,
  SupportNotContained,
  NodeOnGrid,
  NyquistViolation,
  GridTooSmall,
  NotAsymptotic,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for the kinds a single trajectory can hit while being integrated.
bool is_trajectory_failure(ErrorKind kind) noexcept;

}  // namespace bomca
