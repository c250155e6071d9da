#pragma once

#include <stdexcept>
#include <string>

namespace setobs {

enum class ErrorCode {
  invalid_parameter,
  invalid_dimension,
  invalid_ellipsoid,
  singular_transform,
  degenerate_input,
  invalid_basis,
  strong_observability_failure,
  no_stable_observer,
  invalid_design,
  singular_noise,
  singular_innovation,
  case_not_applicable,
  no_certificate,
  certificate_unavailable,
  containment_violation,
  schema_error,
  io_error
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_parameter: return "invalid_parameter";
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::invalid_ellipsoid: return "invalid_ellipsoid";
    case ErrorCode::singular_transform: return "singular_transform";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::invalid_basis: return "invalid_basis";
    case ErrorCode::strong_observability_failure: return "strong_observability_failure";
    case ErrorCode::no_stable_observer: return "no_stable_observer";
    case ErrorCode::invalid_design: return "invalid_design";
    case ErrorCode::singular_noise: return "singular_noise";
    case ErrorCode::singular_innovation: return "singular_innovation";
    case ErrorCode::case_not_applicable: return "case_not_applicable";
    case ErrorCode::no_certificate: return "no_certificate";
    case ErrorCode::certificate_unavailable: return "certificate_unavailable";
    case ErrorCode::containment_violation: return "containment_violation";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace setobs
