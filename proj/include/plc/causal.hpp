#pragma once

#include <map>
#include <string>
#include <string_view>

#include "plc/formula.hpp"
#include "plc/inference.hpp"
#include "plc/program.hpp"

namespace plc {

/// do(x): values forced on a set of internal propositions.
struct Intervention {
  std::map<std::string, bool> values;
};

/// Observed values of a set of internal propositions.
struct Evidence {
  std::map<std::string, bool> values;
};

inline constexpr std::string_view evidence_suffix = "__e";
inline constexpr std::string_view intervention_suffix = "__i";

/// Erases every clause whose effect is intervened on and adds `1.0 :: p.`
/// for each proposition set to true.  Propositions set to false keep no
/// clause and stay in the alphabet, hence are identically false.
Program intervene(const Program& program, const Intervention& intervention);

/// Same transform on the expanded program: logical clauses with an
/// intervened head are erased, `p :-` is added for true values, and all
/// random facts are kept.
DesugaredProgram intervene(const DesugaredProgram& program, const Intervention& intervention);

QueryResult interventional_query(const Program& program, const Formula& query,
                                  const Intervention& intervention,
                                  const EngineOptions& options = {});

/// Two copies of the logical clauses, `p__e` (evidence) and `p__i`
/// (intervention), sharing the original random facts; the intervention is
/// applied to the `__i` copy only.
class TwinProgram {
 public:
  TwinProgram(const Program& source, const Intervention& intervention);

  const DesugaredProgram& expanded() const { return program_; }

  /// Exportable form (see DesugaredProgram::to_program).  Throws
  /// Error(name_collision) when a source name already ends in a copy suffix.
  Program to_program() const;

  static std::string evidence_name(std::string_view name);
  static std::string intervention_name(std::string_view name);

 private:
  DesugaredProgram program_;
  bool ambiguous_names_ = false;
};

TwinProgram twin_program(const Program& program, const Intervention& intervention);

/// pi(query under do(x) | evidence): the query is relabelled onto the
/// intervention copy and the evidence onto the evidence copy of the twin
/// program.  Throws Error(undefined_conditional) for impossible evidence.
QueryResult counterfactual_query(const Program& program, const Formula& query,
                                 const Evidence& evidence, const Intervention& intervention,
                                 const EngineOptions& options = {});

}  // namespace plc
