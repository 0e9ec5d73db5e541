#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tightbell {

enum class ErrorCode {
  shape_mismatch,
  negative_prior,
  not_normalized,
  empty_game,
  unknown_name,
  invalid_parameter,
  too_large,
  truncated,
  not_converged,
  dual_infeasible,
  singular_lambda,
  not_applicable,
  invalid_dims,
  empty_input,
  invalid_spec,
  parse_error,
  internal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::negative_prior: return "NegativePrior";
    case ErrorCode::not_normalized: return "NotNormalized";
    case ErrorCode::empty_game: return "EmptyGame";
    case ErrorCode::unknown_name: return "UnknownName";
    case ErrorCode::invalid_parameter: return "InvalidParameter";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::truncated: return "Truncated";
    case ErrorCode::not_converged: return "NotConverged";
    case ErrorCode::dual_infeasible: return "DualInfeasible";
    case ErrorCode::singular_lambda: return "SingularLambda";
    case ErrorCode::not_applicable: return "NotApplicable";
    case ErrorCode::invalid_dims: return "InvalidDims";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tightbell
