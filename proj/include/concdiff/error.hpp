#pragma once

#include <stdexcept>
#include <string>

namespace concdiff {

enum class ErrorKind {
  InvalidProfile,
  InvalidSpec,
  UnderResolved,
  InvalidDesign,
  Conditioning,
  Domain,
  GridMismatch,
  Configuration,
  Divergence,
  Singularity,
  ProfileVanishes,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a kind tag; callers that need to branch on the failure inspect kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidProfile: return "invalid-profile";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::UnderResolved: return "under-resolved";
    case ErrorKind::InvalidDesign: return "invalid-design";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::ProfileVanishes: return "profile-vanishes";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace concdiff
