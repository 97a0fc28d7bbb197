#include "plc/inference.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>

#include "plc/error.hpp"
#include "plc/graph.hpp"

namespace plc {

EngineOptions engine_options_from_environment() {
  EngineOptions options;
  if (const char* text = std::getenv("PLC_ENUMERATION_CAP")) {
    char* end = nullptr;
    const auto value = std::strtoull(text, &end, 10);
    if (end == text || *end != '\0' || value == 0) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("PLC_ENUMERATION_CAP must be a positive integer, got '") + text +
                      "'");
    }
    options.enumeration_cap = value;
  }
  return options;
}

bool Structure::value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) {
    throw Error(ErrorCode::unknown_proposition, "unknown proposition '" + name + "'");
  }
  return it->second;
}

bool Structure::satisfies(const Formula& formula) const {
  return formula.evaluate([this](const std::string& name) { return value(name); });
}

std::string QueryResult::format(int precision) const {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", precision, probability);
  return buffer;
}

double JointTable::at(const std::map<std::string, bool>& assignment) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < propositions.size(); ++i) {
    auto it = assignment.find(propositions[i]);
    if (it == assignment.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "assignment misses proposition '" + propositions[i] + "'");
    }
    if (it->second) index |= std::size_t{1} << i;
  }
  return probabilities.at(index);
}

Formula conjunction_of(const std::map<std::string, bool>& assignment) {
  std::vector<Formula> literals;
  for (const auto& [name, value] : assignment) {
    Formula atom = Formula::atom(name);
    literals.push_back(value ? atom : Formula::negation(atom));
  }
  return Formula::all_of(literals);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

WorldEvaluator::WorldEvaluator(const DesugaredProgram& program)
    : internal_count_(program.internals.size()),
      fact_count_(program.facts.size()),
      rules_(program.internals.size()) {
  std::map<std::string, std::size_t> internal_index;
  for (std::size_t i = 0; i < program.internals.size(); ++i) {
    internal_index[program.internals[i]] = i;
  }
  std::map<std::string, std::size_t> fact_index;
  for (std::size_t i = 0; i < program.facts.size(); ++i) {
    fact_index[program.facts[i].proposition] = i;
  }
  auto lookup = [](const std::map<std::string, std::size_t>& index, const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error(ErrorCode::unknown_proposition, "unknown proposition '" + name + "'");
    }
    return it->second;
  };

  std::set<ClassDependencyGraph::Edge> edges;
  for (const auto& clause : program.clauses) {
    Rule rule;
    for (const auto& literal : clause.body) {
      rule.body.emplace_back(lookup(internal_index, literal.atom), literal.positive);
      edges.emplace(literal.atom, clause.head);
    }
    for (const auto& u : clause.externals) rule.facts.push_back(lookup(fact_index, u));
    rules_[lookup(internal_index, clause.head)].push_back(std::move(rule));
  }
  const ClassDependencyGraph graph({program.internals.begin(), program.internals.end()},
                                   std::move(edges));
  for (const auto& node : graph.topological_order()) order_.push_back(internal_index.at(node));
}

std::vector<std::uint8_t> WorldEvaluator::evaluate(std::span<const std::uint8_t> externals) const {
  if (externals.size() != fact_count_) {
    throw Error(ErrorCode::invalid_argument,
                "expected " + std::to_string(fact_count_) + " external values, got " +
                    std::to_string(externals.size()));
  }
  std::vector<std::uint8_t> values(internal_count_, 0);
  for (const auto node : order_) {
    for (const auto& rule : rules_[node]) {
      const bool fires =
          std::all_of(rule.body.begin(), rule.body.end(),
                      [&](const auto& literal) { return (values[literal.first] != 0) == literal.second; }) &&
          std::all_of(rule.facts.begin(), rule.facts.end(),
                      [&](std::size_t f) { return externals[f] != 0; });
      if (fires) {
        values[node] = 1;
        break;
      }
    }
  }
  return values;
}

Structure evaluate_world(const DesugaredProgram& program, const ExternalWorld& world) {
  std::map<std::string, bool> values;
  std::vector<std::uint8_t> externals;
  for (const auto& fact : program.facts) {
    auto it = world.values.find(fact.proposition);
    if (it == world.values.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "external world has no value for '" + fact.proposition + "'");
    }
    values[fact.proposition] = it->second;
    externals.push_back(it->second ? 1 : 0);
  }
  const auto internals = WorldEvaluator(program).evaluate(externals);
  for (std::size_t i = 0; i < internals.size(); ++i) {
    values[program.internals[i]] = internals[i] != 0;
  }
  return Structure(std::move(values));
}

namespace {

using Mask = std::uint64_t;

struct BodyLiteral {
  std::size_t index;  // into relevant internals
  bool positive;
};

struct CompiledClause {
  std::size_t head;
  std::vector<BodyLiteral> outer;  // atoms decided before the group
  std::vector<BodyLiteral> inner;  // atoms that are heads of the same group
  std::vector<std::size_t> facts;  // indices into program.facts
};

struct Group {
  std::vector<std::size_t> heads;  // evaluation order inside the group
  std::vector<CompiledClause> clauses;
};

bool satisfied(const std::vector<BodyLiteral>& literals, Mask state) {
  return std::all_of(literals.begin(), literals.end(), [state](const BodyLiteral& l) {
    return ((state >> l.index) & 1U) == static_cast<Mask>(l.positive);
  });
}

/// Enumerates the external worlds of the facts that can reach `atoms`.
class WorldEnumerator {
 public:
  WorldEnumerator(const DesugaredProgram& program, const std::set<std::string>& atoms,
                  const EngineOptions& options)
      : program_(program), options_(options) {
    for (const auto& atom : atoms) {
      if (!program.is_internal(atom)) {
        if (program.is_external(atom)) {
          throw Error(ErrorCode::external_proposition,
                      "'" + atom + "' is an external proposition and cannot be queried");
        }
        throw Error(ErrorCode::unknown_proposition, "unknown proposition '" + atom + "'");
      }
    }
    collect_relevant(atoms);
    build_groups();
  }

  /// Returns the final merged states; `prune` may drop partial states.
  template <typename Prune>
  std::vector<std::pair<Mask, double>> run(Prune&& prune) {
    std::vector<std::pair<Mask, double>> states{{0, 1.0}};
    Mask decided = 0;
    for (std::size_t i = 0; i < relevant_.size(); ++i) {
      if (!has_clauses_[i]) decided |= Mask{1} << i;
    }
    for (const auto& group : groups_) {
      std::unordered_map<Mask, double> next;
      for (const auto& [state, mass] : states) expand(group, state, mass, next);
      for (auto head : group.heads) decided |= Mask{1} << head;
      states.clear();
      for (const auto& entry : next) {
        if (!prune(entry.first, decided)) states.push_back(entry);
      }
      std::sort(states.begin(), states.end());
    }
    return states;
  }

  std::optional<bool> partial_value(const std::string& name, Mask state, Mask decided) const {
    const auto i = index_.at(name);
    if (((decided >> i) & 1U) == 0) return std::nullopt;
    return ((state >> i) & 1U) != 0;
  }

  bool value(const std::string& name, Mask state) const {
    return ((state >> index_.at(name)) & 1U) != 0;
  }

  const std::vector<std::string>& relevant() const { return relevant_; }
  std::uint64_t worlds() const { return worlds_; }

 private:
  void collect_relevant(const std::set<std::string>& atoms) {
    std::set<std::string> closure(atoms.begin(), atoms.end());
    std::vector<std::string> pending(atoms.begin(), atoms.end());
    while (!pending.empty()) {
      const std::string node = pending.back();
      pending.pop_back();
      for (const auto& clause : program_.clauses) {
        if (clause.head != node) continue;
        for (const auto& literal : clause.body) {
          if (closure.insert(literal.atom).second) pending.push_back(literal.atom);
        }
      }
    }
    relevant_.assign(closure.begin(), closure.end());
    if (relevant_.size() > 64) {
      throw Error(ErrorCode::size_cap, "query depends on " + std::to_string(relevant_.size()) +
                                           " internal propositions; at most 64 are supported");
    }
    for (std::size_t i = 0; i < relevant_.size(); ++i) index_[relevant_[i]] = i;
    has_clauses_.assign(relevant_.size(), false);
  }

  void build_groups() {
    std::map<std::string, std::size_t> fact_index;
    for (std::size_t i = 0; i < program_.facts.size(); ++i) {
      fact_index[program_.facts[i].proposition] = i;
    }

    // Union-find over relevant clauses: same head or a shared external.
    std::vector<std::size_t> clauses;
    for (std::size_t c = 0; c < program_.clauses.size(); ++c) {
      if (index_.contains(program_.clauses[c].head)) clauses.push_back(c);
    }
    std::vector<std::size_t> parent(clauses.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<std::string, std::size_t> owner;
    for (std::size_t k = 0; k < clauses.size(); ++k) {
      const auto& clause = program_.clauses[clauses[k]];
      std::vector<std::string> keys{"h:" + clause.head};
      for (const auto& u : clause.externals) {
        if (!fact_index.contains(u)) {
          throw Error(ErrorCode::unknown_proposition,
                      "clause for '" + clause.head + "' uses undeclared external '" + u + "'");
        }
        keys.push_back("u:" + u);
      }
      for (const auto& key : keys) {
        auto [it, inserted] = owner.emplace(key, k);
        if (!inserted) parent[find(k)] = find(it->second);
      }
    }

    std::map<std::size_t, Group> by_root;
    for (std::size_t k = 0; k < clauses.size(); ++k) {
      const auto& source = program_.clauses[clauses[k]];
      CompiledClause compiled{index_.at(source.head), {}, {}, {}};
      for (const auto& literal : source.body) {
        compiled.outer.push_back({index_.at(literal.atom), literal.positive});
      }
      for (const auto& u : source.externals) compiled.facts.push_back(fact_index.at(u));
      std::sort(compiled.facts.begin(), compiled.facts.end());
      compiled.facts.erase(std::unique(compiled.facts.begin(), compiled.facts.end()),
                           compiled.facts.end());
      has_clauses_[compiled.head] = true;
      by_root[find(k)].clauses.push_back(std::move(compiled));
    }

    std::vector<Group> groups;
    std::vector<std::size_t> group_of(relevant_.size(), SIZE_MAX);
    for (auto& [root, group] : by_root) {
      std::set<std::size_t> heads;
      for (const auto& clause : group.clauses) heads.insert(clause.head);
      for (auto head : heads) group_of[head] = groups.size();
      group.heads.assign(heads.begin(), heads.end());
      groups.push_back(std::move(group));
    }

    // Split body literals into outer/inner and order heads inside each group.
    for (auto& group : groups) {
      const std::set<std::size_t> heads(group.heads.begin(), group.heads.end());
      std::map<std::size_t, std::set<std::size_t>> inner_deps;
      for (auto& clause : group.clauses) {
        std::vector<BodyLiteral> outer;
        for (const auto& literal : clause.outer) {
          if (heads.contains(literal.index)) {
            clause.inner.push_back(literal);
            inner_deps[clause.head].insert(literal.index);
          } else {
            outer.push_back(literal);
          }
        }
        clause.outer = std::move(outer);
      }
      std::vector<std::size_t> order;
      std::set<std::size_t> done;
      while (order.size() < group.heads.size()) {
        bool progressed = false;
        for (auto head : group.heads) {
          if (done.contains(head)) continue;
          const auto& deps = inner_deps[head];
          if (std::all_of(deps.begin(), deps.end(),
                          [&done](std::size_t d) { return done.contains(d); })) {
            order.push_back(head);
            done.insert(head);
            progressed = true;
          }
        }
        if (!progressed) {
          throw Error(ErrorCode::cyclic_program,
                      "program is cyclic around '" + relevant_[group.heads.front()] + "'");
        }
      }
      group.heads = std::move(order);
    }

    // Groups in dependency order.
    std::vector<std::set<std::size_t>> depends(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (const auto& clause : groups[g].clauses) {
        for (const auto& literal : clause.outer) {
          if (group_of[literal.index] != SIZE_MAX) depends[g].insert(group_of[literal.index]);
        }
      }
    }
    std::vector<bool> placed(groups.size(), false);
    while (groups_.size() < groups.size()) {
      bool progressed = false;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (placed[g]) continue;
        if (std::all_of(depends[g].begin(), depends[g].end(),
                        [&placed](std::size_t d) { return placed[d]; })) {
          placed[g] = true;
          groups_.push_back(groups[g]);
          progressed = true;
        }
      }
      if (!progressed) {
        throw Error(ErrorCode::cyclic_program, "program is cyclic; cannot evaluate the query");
      }
    }
  }

  void expand(const Group& group, Mask state, double mass,
              std::unordered_map<Mask, double>& next) {
    // Facts of clauses whose outer body already fails cannot matter; facts
    // with probability 0 or 1 are fixed rather than enumerated.
    std::vector<const CompiledClause*> live;
    std::vector<std::size_t> free_facts;
    for (const auto& clause : group.clauses) {
      if (!satisfied(clause.outer, state)) continue;
      bool dead = false;
      for (auto f : clause.facts) dead = dead || program_.facts[f].probability <= 0.0;
      if (dead) continue;
      live.push_back(&clause);
      for (auto f : clause.facts) {
        if (program_.facts[f].probability < 1.0) free_facts.push_back(f);
      }
    }
    std::sort(free_facts.begin(), free_facts.end());
    free_facts.erase(std::unique(free_facts.begin(), free_facts.end()), free_facts.end());
    if (free_facts.size() >= 63) {
      throw Error(ErrorCode::enumeration_cap,
                  "a single node group has " + std::to_string(free_facts.size()) +
                      " live random facts; refusing to enumerate");
    }
    const Mask combinations = Mask{1} << free_facts.size();
    worlds_ += combinations;
    if (worlds_ > options_.enumeration_cap) {
      throw Error(ErrorCode::enumeration_cap,
                  "enumeration exceeds the cap of " + std::to_string(options_.enumeration_cap) +
                      " worlds");
    }

    std::map<std::size_t, std::size_t> position;
    for (std::size_t i = 0; i < free_facts.size(); ++i) position[free_facts[i]] = i;

    for (Mask world = 0; world < combinations; ++world) {
      double weight = mass;
      for (std::size_t i = 0; i < free_facts.size(); ++i) {
        const double p = program_.facts[free_facts[i]].probability;
        weight *= ((world >> i) & 1U) ? p : 1.0 - p;
      }
      Mask result = state;
      for (auto head : group.heads) {
        bool holds = false;
        for (const auto* clause : live) {
          if (clause->head != head || !satisfied(clause->inner, result)) continue;
          bool fires = true;
          for (auto f : clause->facts) {
            auto it = position.find(f);
            if (it != position.end() && ((world >> it->second) & 1U) == 0) fires = false;
          }
          if (fires) {
            holds = true;
            break;
          }
        }
        if (holds) result |= Mask{1} << head;
      }
      next[result] += weight;
    }
  }

  const DesugaredProgram& program_;
  EngineOptions options_;
  std::vector<std::string> relevant_;
  std::map<std::string, std::size_t> index_;
  std::vector<bool> has_clauses_;
  std::vector<Group> groups_;
  std::uint64_t worlds_ = 0;
};

std::set<std::string> atoms_of(const Formula& a, const Formula& b) {
  auto atoms = a.atoms();
  auto more = b.atoms();
  atoms.insert(more.begin(), more.end());
  return atoms;
}

}  // namespace

QueryResult probability(const DesugaredProgram& program, const Formula& query,
                        const EngineOptions& options) {
  WorldEnumerator enumerator(program, query.atoms(), options);
  const auto states = enumerator.run([](Mask, Mask) { return false; });
  std::vector<double> masses;
  for (const auto& [state, mass] : states) {
    if (query.evaluate([&](const std::string& name) { return enumerator.value(name, state); })) {
      masses.push_back(mass);
    }
  }
  return {std::clamp(pairwise_sum(masses), 0.0, 1.0), enumerator.worlds(), 1.0};
}

QueryResult probability(const Program& program, const Formula& query,
                        const EngineOptions& options) {
  return probability(desugar(program), query, options);
}

QueryResult conditional(const DesugaredProgram& program, const Formula& query,
                        const Formula& evidence, const EngineOptions& options) {
  WorldEnumerator enumerator(program, atoms_of(query, evidence), options);
  const auto states = enumerator.run([&](Mask state, Mask decided) {
    auto value = evidence.evaluate_partial([&](const std::string& name) {
      return enumerator.partial_value(name, state, decided);
    });
    return value == false;
  });
  std::vector<double> evidence_masses;
  std::vector<double> joint_masses;
  for (const auto& [state, mass] : states) {
    auto valuation = [&](const std::string& name) { return enumerator.value(name, state); };
    if (!evidence.evaluate(valuation)) continue;
    evidence_masses.push_back(mass);
    if (query.evaluate(valuation)) joint_masses.push_back(mass);
  }
  const double evidence_mass = pairwise_sum(evidence_masses);
  if (!(evidence_mass > 0.0)) {
    throw Error(ErrorCode::undefined_conditional,
                "evidence '" + evidence.to_string() + "' has probability zero");
  }
  const double joint = pairwise_sum(joint_masses);
  return {std::clamp(joint / evidence_mass, 0.0, 1.0), enumerator.worlds(), evidence_mass};
}

QueryResult conditional(const Program& program, const Formula& query, const Formula& evidence,
                        const EngineOptions& options) {
  return conditional(desugar(program), query, evidence, options);
}

JointTable joint_table(const DesugaredProgram& program, const EngineOptions& options) {
  if (program.internals.size() > joint_table_limit) {
    throw Error(ErrorCode::size_cap, "joint table over " +
                                         std::to_string(program.internals.size()) +
                                         " propositions exceeds the limit of " +
                                         std::to_string(joint_table_limit));
  }
  const std::set<std::string> atoms(program.internals.begin(), program.internals.end());
  WorldEnumerator enumerator(program, atoms, options);
  const auto states = enumerator.run([](Mask, Mask) { return false; });
  JointTable table{program.internals,
                   std::vector<double>(std::size_t{1} << program.internals.size(), 0.0)};
  // The enumerator indexes all internals in sorted order, which is the
  // table's own bit order.
  for (const auto& [state, mass] : states) table.probabilities[state] += mass;
  return table;
}

JointTable joint_table(const Program& program, const EngineOptions& options) {
  return joint_table(desugar(program), options);
}

}  // namespace plc
