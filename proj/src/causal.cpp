#include "plc/causal.hpp"

#include <algorithm>
#include <set>

#include "plc/error.hpp"

namespace plc {

namespace {

template <typename Contains>
void require_internal(const std::map<std::string, bool>& values, Contains&& contains,
                      std::string_view what) {
  for (const auto& [name, value] : values) {
    if (!contains(name)) {
      throw Error(ErrorCode::unknown_proposition,
                  std::string(what) + " mentions unknown proposition '" + name + "'");
    }
  }
}

std::vector<Literal> relabel(const std::vector<Literal>& body, std::string_view suffix) {
  std::vector<Literal> result;
  result.reserve(body.size());
  for (const auto& literal : body) {
    result.push_back({literal.atom + std::string(suffix), literal.positive});
  }
  return result;
}

bool ends_with_copy_suffix(const std::string& name) {
  return name.ends_with(evidence_suffix) || name.ends_with(intervention_suffix);
}

}  // namespace

Program intervene(const Program& program, const Intervention& intervention) {
  require_internal(
      intervention.values, [&](const std::string& n) { return program.contains(n); },
      "intervention");
  std::vector<Clause> clauses;
  for (const auto& clause : program.clauses()) {
    if (!intervention.values.contains(clause.effect)) clauses.push_back(clause);
  }
  for (const auto& [name, value] : intervention.values) {
    if (value) clauses.push_back({name, {}, 1.0});
  }
  const auto& alphabet = program.propositions();
  return Program(std::move(clauses), {alphabet.begin(), alphabet.end()});
}

DesugaredProgram intervene(const DesugaredProgram& program, const Intervention& intervention) {
  require_internal(
      intervention.values, [&](const std::string& n) { return program.is_internal(n); },
      "intervention");
  DesugaredProgram result;
  result.internals = program.internals;
  result.facts = program.facts;
  for (const auto& clause : program.clauses) {
    if (!intervention.values.contains(clause.head)) result.clauses.push_back(clause);
  }
  for (const auto& [name, value] : intervention.values) {
    if (value) result.clauses.push_back({name, {}, {}});
  }
  return result;
}

QueryResult interventional_query(const Program& program, const Formula& query,
                                  const Intervention& intervention,
                                  const EngineOptions& options) {
  return probability(intervene(program, intervention), query, options);
}

std::string TwinProgram::evidence_name(std::string_view name) {
  return std::string(name) + std::string(evidence_suffix);
}

std::string TwinProgram::intervention_name(std::string_view name) {
  return std::string(name) + std::string(intervention_suffix);
}

TwinProgram::TwinProgram(const Program& source, const Intervention& intervention) {
  require_internal(
      intervention.values, [&](const std::string& n) { return source.contains(n); },
      "intervention");
  const DesugaredProgram base = desugar(source);

  DesugaredProgram doubled;
  doubled.facts = base.facts;
  for (const auto& name : base.internals) {
    doubled.internals.push_back(evidence_name(name));
    doubled.internals.push_back(intervention_name(name));
    ambiguous_names_ = ambiguous_names_ || ends_with_copy_suffix(name);
  }
  std::sort(doubled.internals.begin(), doubled.internals.end());
  for (const auto& clause : base.clauses) {
    doubled.clauses.push_back(
        {evidence_name(clause.head), relabel(clause.body, evidence_suffix), clause.externals});
  }
  for (const auto& clause : base.clauses) {
    doubled.clauses.push_back({intervention_name(clause.head),
                               relabel(clause.body, intervention_suffix), clause.externals});
  }

  Intervention on_copy;
  for (const auto& [name, value] : intervention.values) {
    on_copy.values[intervention_name(name)] = value;
  }
  program_ = intervene(doubled, on_copy);
}

Program TwinProgram::to_program() const {
  if (ambiguous_names_) {
    throw Error(ErrorCode::name_collision,
                "source program already uses names ending in '__e' or '__i'; the exported "
                "twin program would be ambiguous");
  }
  return program_.to_program();
}

TwinProgram twin_program(const Program& program, const Intervention& intervention) {
  return TwinProgram(program, intervention);
}

QueryResult counterfactual_query(const Program& program, const Formula& query,
                                 const Evidence& evidence, const Intervention& intervention,
                                 const EngineOptions& options) {
  require_internal(
      evidence.values, [&](const std::string& n) { return program.contains(n); }, "evidence");
  for (const auto& atom : query.atoms()) {
    if (!program.contains(atom)) {
      throw Error(ErrorCode::unknown_proposition, "unknown proposition '" + atom + "'");
    }
  }
  const TwinProgram twin(program, intervention);
  std::map<std::string, bool> observed;
  for (const auto& [name, value] : evidence.values) {
    observed[TwinProgram::evidence_name(name)] = value;
  }
  return conditional(twin.expanded(), query.relabel(intervention_suffix), conjunction_of(observed),
                     options);
}

}  // namespace plc
