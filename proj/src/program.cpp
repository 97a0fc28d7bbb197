#include "plc/program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>

#include "plc/error.hpp"
#include "plc/graph.hpp"
#include "plc/parser.hpp"

namespace plc {

bool is_valid_name(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
  });
}

std::string to_string(const Literal& literal) {
  return literal.positive ? literal.atom : "\\+" + literal.atom;
}

namespace {

std::string describe(const Clause& clause) {
  std::string text = clause.effect;
  if (!clause.causes.empty()) {
    text += " :- ";
    for (std::size_t i = 0; i < clause.causes.size(); ++i) {
      if (i > 0) text += ", ";
      text += to_string(clause.causes[i]);
    }
  }
  return text;
}

void require_name(const std::string& name) {
  if (!is_valid_name(name)) {
    throw Error(ErrorCode::invalid_name, "invalid proposition name '" + name + "'");
  }
}

void normalize(Clause& clause) {
  require_name(clause.effect);
  for (const auto& literal : clause.causes) require_name(literal.atom);
  if (!(clause.probability >= 0.0 && clause.probability <= 1.0)) {
    throw Error(ErrorCode::probability_range,
                "probability " + std::to_string(clause.probability) + " of clause '" +
                    describe(clause) + "' is outside [0, 1]");
  }
  std::sort(clause.causes.begin(), clause.causes.end());
  clause.causes.erase(std::unique(clause.causes.begin(), clause.causes.end()),
                      clause.causes.end());
  for (std::size_t i = 1; i < clause.causes.size(); ++i) {
    if (clause.causes[i].atom == clause.causes[i - 1].atom) {
      throw Error(ErrorCode::contradictory_body,
                  "clause '" + describe(clause) + "' has contradictory body on '" +
                      clause.causes[i].atom + "'");
    }
  }
}

// Topological rank of each node; nodes on cycles follow in name order.
std::map<std::string, std::size_t> canonical_ranks(const ClassDependencyGraph& graph) {
  std::map<std::string, std::size_t> indegree;
  for (const auto& node : graph.nodes()) indegree[node] = 0;
  for (const auto& [from, to] : graph.edges()) ++indegree[to];

  std::set<std::string> ready;
  for (const auto& [node, degree] : indegree) {
    if (degree == 0) ready.insert(node);
  }
  std::map<std::string, std::size_t> rank;
  while (!ready.empty()) {
    std::string node = *ready.begin();
    ready.erase(ready.begin());
    rank.emplace(node, rank.size());
    for (const auto& child : graph.children(node)) {
      if (--indegree[child] == 0) ready.insert(child);
    }
  }
  for (const auto& node : graph.nodes()) {
    if (!rank.contains(node)) rank.emplace(node, rank.size());
  }
  return rank;
}

}  // namespace

Program::Program(std::vector<Clause> clauses, const std::set<std::string>& declared) {
  std::set<std::string> alphabet;
  for (const auto& name : declared) {
    require_name(name);
    alphabet.insert(name);
  }
  std::set<std::pair<std::string, std::vector<Literal>>> seen;
  for (auto& clause : clauses) {
    normalize(clause);
    if (!seen.emplace(clause.effect, clause.causes).second) {
      throw Error(ErrorCode::duplicate_clause,
                  "duplicate clause for '" + describe(clause) + "'");
    }
    alphabet.insert(clause.effect);
    for (const auto& literal : clause.causes) alphabet.insert(literal.atom);
  }
  propositions_.assign(alphabet.begin(), alphabet.end());
  clauses_ = std::move(clauses);

  const auto rank = canonical_ranks(graph());
  std::sort(clauses_.begin(), clauses_.end(), [&rank](const Clause& a, const Clause& b) {
    const auto ra = rank.at(a.effect);
    const auto rb = rank.at(b.effect);
    if (ra != rb) return ra < rb;
    return a.causes < b.causes;
  });
}

bool Program::contains(std::string_view name) const {
  return std::binary_search(propositions_.begin(), propositions_.end(), name);
}

std::vector<Clause> Program::clauses_for(std::string_view name) const {
  std::vector<Clause> result;
  for (const auto& clause : clauses_) {
    if (clause.effect == name) result.push_back(clause);
  }
  return result;
}

ClassDependencyGraph Program::graph() const { return ClassDependencyGraph::of(*this); }

bool same_structure(const Program& a, const Program& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.clauses()[i].effect != b.clauses()[i].effect ||
        a.clauses()[i].causes != b.clauses()[i].causes) {
      return false;
    }
  }
  return true;
}

double max_probability_difference(const Program& a, const Program& b) {
  if (!same_structure(a, b)) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.clauses()[i].probability - b.clauses()[i].probability));
  }
  return worst;
}

std::vector<std::string> DesugaredProgram::externals() const {
  std::vector<std::string> names;
  names.reserve(facts.size());
  for (const auto& fact : facts) names.push_back(fact.proposition);
  return names;
}

bool DesugaredProgram::is_internal(std::string_view name) const {
  return std::binary_search(internals.begin(), internals.end(), name);
}

bool DesugaredProgram::is_external(std::string_view name) const {
  return std::any_of(facts.begin(), facts.end(),
                     [name](const RandomFact& fact) { return fact.proposition == name; });
}

PropositionKind DesugaredProgram::kind_of(std::string_view name) const {
  if (is_internal(name)) return PropositionKind::internal;
  if (is_external(name)) return PropositionKind::external;
  throw Error(ErrorCode::unknown_proposition, "unknown proposition '" + std::string(name) + "'");
}

Program round_probabilities(const Program& program, int digits) {
  std::vector<Clause> clauses = program.clauses();
  for (auto& clause : clauses) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, clause.probability);
    clause.probability = std::clamp(std::strtod(buffer, nullptr), 0.0, 1.0);
  }
  const auto& names = program.propositions();
  return Program(std::move(clauses), {names.begin(), names.end()});
}

Program DesugaredProgram::to_program() const {
  std::vector<Clause> result;
  for (const auto& fact : facts) {
    result.push_back({fact.proposition, {}, fact.probability});
  }
  for (const auto& logical : clauses) {
    Clause clause{logical.head, logical.body, 1.0};
    for (const auto& external : logical.externals) clause.causes.push_back({external, true});
    result.push_back(std::move(clause));
  }
  return Program(std::move(result), {internals.begin(), internals.end()});
}

DesugaredProgram desugar(const Program& program) {
  const auto& internals = program.propositions();
  std::string prefix = "u";
  auto collides = [&internals](const std::string& prefix) {
    return std::any_of(internals.begin(), internals.end(), [&prefix](const std::string& name) {
      return name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0 &&
             std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()), name.end(),
                         [](char c) { return c >= '0' && c <= '9'; });
    });
  };
  while (collides(prefix)) prefix += '_';

  DesugaredProgram result;
  result.internals = internals;
  std::size_t index = 0;
  for (const auto& clause : program.clauses()) {
    std::string external = prefix + std::to_string(++index);
    result.facts.push_back({external, clause.probability});
    result.clauses.push_back({clause.effect, clause.causes, {external}});
  }
  return result;
}

}  // namespace plc
