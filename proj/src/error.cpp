#include "bomca/error.hpp"

namespace bomca {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::Blowup: return "Blowup";
    case ErrorKind::SeedNotFound: return "SeedNotFound";
    case ErrorKind::DeadRegion: return "DeadRegion";
    case ErrorKind::ManifoldStall: return "ManifoldStall";
    case ErrorKind::LandingFailed: return "LandingFailed";
    case ErrorKind::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorKind::NonMonotonicArrivals: return "NonMonotonicArrivals";
    case ErrorKind::SupportNotContained: return "SupportNotContained";
    case ErrorKind::NodeOnGrid: return "NodeOnGrid";
    case ErrorKind::NyquistViolation: return "NyquistViolation";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NotAsymptotic: return "NotAsymptotic";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

bool is_trajectory_failure(ErrorKind kind) noexcept {
  return kind == ErrorKind::PoleProximity || kind == ErrorKind::StepLimitExceeded ||
         kind == ErrorKind::Blowup;
}

}  // namespace bomca
