#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plc {

enum class ErrorCode {
  syntax,
  contradictory_body,
  duplicate_clause,
  probability_range,
  invalid_name,
  unknown_proposition,
  external_proposition,
  cyclic_program,
  enumeration_cap,
  undefined_conditional,
  size_cap,
  oracle_failure,
  saturation,
  non_monotone,
  starved_pattern,
  name_collision,
  invalid_argument,
  io,
  usage,
};

std::string_view to_string(ErrorCode code);

/// Every domain failure in the library is reported as an Error; the code is
/// what the command line prints inside `error[...]`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plc
