#include "plc/error.hpp"

namespace plc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::contradictory_body: return "contradictory-body";
    case ErrorCode::duplicate_clause: return "duplicate-clause";
    case ErrorCode::probability_range: return "probability-range";
    case ErrorCode::invalid_name: return "invalid-name";
    case ErrorCode::unknown_proposition: return "unknown-proposition";
    case ErrorCode::external_proposition: return "external-proposition";
    case ErrorCode::cyclic_program: return "cyclic-program";
    case ErrorCode::enumeration_cap: return "enumeration-cap";
    case ErrorCode::undefined_conditional: return "undefined-conditional";
    case ErrorCode::size_cap: return "size-cap";
    case ErrorCode::oracle_failure: return "oracle-failure";
    case ErrorCode::saturation: return "saturation";
    case ErrorCode::non_monotone: return "non-monotone";
    case ErrorCode::starved_pattern: return "starved-pattern";
    case ErrorCode::name_collision: return "name-collision";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::io: return "io";
    case ErrorCode::usage: return "usage";
  }
  return "unknown";
}

}  // namespace plc
