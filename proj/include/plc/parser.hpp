#pragma once

#include <map>
#include <string>
#include <string_view>

#include "plc/formula.hpp"
#include "plc/program.hpp"

namespace plc {

/// Parses the clause syntax
///
///     0.5 :: treatment.
///     0.4 :: recovery :- treatment.
///     0.5 :: recovery :- \+ treatment.   % negative cause
///
/// Errors carry `line:column`.
Program parse_program(std::string_view text);

/// Canonical text, one clause per line; parse_program(print_program(p)) == p
/// for every program without clause-less declarations.
std::string print_program(const Program& program);

/// Shortest decimal that reads back to the same double, always with a
/// decimal point (`0.5`, `1.0`).
std::string format_probability(double probability);

/// Grammar, loosest binding first:
///   disj := conj ('|' conj)*
///   conj := unary ('&' unary)*
///   unary := ('!' | '\+') unary | '(' disj ')' | 'true' | 'false' | atom
/// Atoms must be internal propositions of `program`.
Formula parse_formula(std::string_view text, const Program& program);

/// Same grammar without the alphabet check.
Formula parse_formula(std::string_view text);

/// Comma-separated literals with `\+` for negation, whitespace ignored:
/// `\+treatment, recovery`.  Atoms must be distinct propositions of `program`.
std::map<std::string, bool> parse_assignment(std::string_view text,
                                             const Program& program);

}  // namespace plc
