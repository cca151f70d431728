#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcpace {

enum class ErrorCode {
  singular_matrix,
  no_convergence,
  dimension_mismatch,
  condition_violated,
  out_of_regime,
  degenerate_delta,
  degenerate_input,
  degenerate_border,
  continuity_violation,
  no_bracket,
  evaluation_failure,
  index_out_of_range,
  insufficient_data,
  invalid_argument,
  parse_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bcpace
