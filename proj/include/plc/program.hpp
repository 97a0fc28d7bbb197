#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace plc {

class ClassDependencyGraph;

enum class PropositionKind { internal, external };

struct Proposition {
  std::string name;
  PropositionKind kind = PropositionKind::internal;

  auto operator<=>(const Proposition&) const = default;
};

/// True for identifiers accepted by the program syntax: a lowercase letter
/// followed by letters, digits or underscores.
bool is_valid_name(std::string_view name);

struct Literal {
  std::string atom;
  bool positive = true;

  Literal negated() const { return {atom, !positive}; }

  // Orders by atom first so a sorted body groups p and \+p together.
  auto operator<=>(const Literal&) const = default;
};

std::string to_string(const Literal& literal);

/// `probability :: effect :- causes.` over internal propositions.
struct Clause {
  std::string effect;
  std::vector<Literal> causes;  // sorted, duplicate-free
  double probability = 1.0;

  bool operator==(const Clause&) const = default;
};

/// A finite set of probabilistic clauses kept in canonical order: effects in
/// topological order of the class dependency graph (lexicographic among
/// ready nodes), then by sorted body.
///
/// Propositions may also be declared without any defining clause; such a
/// proposition is identically false.  Declarations are kept in memory only,
/// printing emits clauses.
class Program {
 public:
  Program() = default;

  /// Throws Error on a contradictory body, a duplicate (effect, causes)
  /// pair, a probability outside [0, 1], or an invalid name.
  explicit Program(std::vector<Clause> clauses,
                   const std::set<std::string>& declared = {});

  const std::vector<Clause>& clauses() const { return clauses_; }

  /// Sorted internal alphabet: every proposition mentioned or declared.
  const std::vector<std::string>& propositions() const { return propositions_; }

  bool contains(std::string_view name) const;
  bool empty() const { return clauses_.empty(); }
  std::size_t size() const { return clauses_.size(); }

  /// Clauses whose effect is `name`, in canonical order.
  std::vector<Clause> clauses_for(std::string_view name) const;

  ClassDependencyGraph graph() const;

  bool operator==(const Program&) const = default;

 private:
  std::vector<Clause> clauses_;
  std::vector<std::string> propositions_;
};

/// Same effects and bodies, ignoring probabilities.
bool same_structure(const Program& a, const Program& b);

/// Largest absolute probability difference between corresponding clauses;
/// infinity when the structures differ.
double max_probability_difference(const Program& a, const Program& b);

/// The same clauses with every probability rounded to `digits` significant
/// decimal digits, kept inside [0, 1].
Program round_probabilities(const Program& program, int digits);

/// A logical clause `head :- body, externals` of the expanded program.
struct LogicalClause {
  std::string head;
  std::vector<Literal> body;           // internal literals
  std::vector<std::string> externals;  // external propositions, all positive

  bool operator==(const LogicalClause&) const = default;
};

struct RandomFact {
  std::string proposition;
  double probability = 0.0;

  bool operator==(const RandomFact&) const = default;
};

/// A logic program over internal propositions guarded by independent random
/// facts on external propositions.  Several logical clauses may share an
/// external proposition (the twin construction does so).
struct DesugaredProgram {
  std::vector<std::string> internals;  // sorted
  std::vector<LogicalClause> clauses;
  std::vector<RandomFact> facts;

  std::vector<std::string> externals() const;
  PropositionKind kind_of(std::string_view name) const;
  bool is_internal(std::string_view name) const;
  bool is_external(std::string_view name) const;

  /// Rebuilds the external random facts as ordinary clauses (`p :: u.`) and
  /// the logical clauses as probability-one clauses over them.  The result
  /// has the same distribution on the original internal propositions.
  Program to_program() const;

  bool operator==(const DesugaredProgram&) const = default;
};

/// One logical clause and one fresh random fact per source clause.  Fresh
/// names are u1, u2, ... in canonical clause order; the prefix gains
/// underscores until it cannot collide with an internal name.
DesugaredProgram desugar(const Program& program);

}  // namespace plc
