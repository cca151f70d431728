#include "bcpace/error.hpp"

namespace bcpace {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::singular_matrix: return "SingularMatrix";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::condition_violated: return "ConditionViolated";
    case ErrorCode::out_of_regime: return "OutOfRegime";
    case ErrorCode::degenerate_delta: return "DegenerateDelta";
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::degenerate_border: return "DegenerateBorder";
    case ErrorCode::continuity_violation: return "ContinuityViolation";
    case ErrorCode::no_bracket: return "NoBracket";
    case ErrorCode::evaluation_failure: return "EvaluationFailure";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::insufficient_data: return "InsufficientData";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

}  // namespace bcpace
