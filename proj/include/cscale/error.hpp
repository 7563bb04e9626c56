#pragma once

#include <stdexcept>
#include <string>

namespace cscale {

enum class ErrorKind {
  InvalidArgument,
  UnknownTag,
  Unsupported,
  NotOnBoundary,
  NotInterior,
  DegenerateGradient,
  NotStronglyPseudoconvex,
  NotConvex,
  RootNotBracketed,
  SearchFailed,
  SingularJacobian,
  RankDeficient,
  IterationCap,
  Truncation,
  Pole,
  AmbiguousNearestPoint,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::UnknownTag: return "unknown tag";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NotOnBoundary: return "point not on boundary";
    case ErrorKind::NotInterior: return "point not interior";
    case ErrorKind::DegenerateGradient: return "degenerate gradient";
    case ErrorKind::NotStronglyPseudoconvex: return "not strongly pseudoconvex";
    case ErrorKind::NotConvex: return "not convex";
    case ErrorKind::RootNotBracketed: return "root not bracketed";
    case ErrorKind::SearchFailed: return "search failed";
    case ErrorKind::SingularJacobian: return "singular jacobian";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::IterationCap: return "iteration cap reached";
    case ErrorKind::Truncation: return "truncation insufficient";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::AmbiguousNearestPoint: return "ambiguous nearest point";
  }
  return "error";
}

}  // namespace cscale
