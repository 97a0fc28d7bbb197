#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plc/formula.hpp"
#include "plc/program.hpp"

namespace plc {

struct EngineOptions {
  /// Largest number of (partial) external worlds one query may enumerate.
  std::uint64_t enumeration_cap = std::uint64_t{1} << 26;
};

/// Reads PLC_ENUMERATION_CAP when set, the built-in default otherwise.
EngineOptions engine_options_from_environment();

/// Truth values for every external proposition of a desugared program.
struct ExternalWorld {
  std::map<std::string, bool> values;
};

/// A total truth assignment to internal and external propositions.
class Structure {
 public:
  explicit Structure(std::map<std::string, bool> values) : values_(std::move(values)) {}

  bool value(const std::string& name) const;
  bool satisfies(const Formula& formula) const;
  const std::map<std::string, bool>& values() const { return values_; }

 private:
  std::map<std::string, bool> values_;
};

struct QueryResult {
  double probability = 0.0;
  std::uint64_t worlds_evaluated = 0;
  double conditioning_mass = 1.0;

  std::string format(int precision = 6) const;
};

/// Probabilities of every assignment to the internal propositions.  Entry i
/// assigns propositions[j] the value of bit j of i.
struct JointTable {
  std::vector<std::string> propositions;
  std::vector<double> probabilities;

  double at(const std::map<std::string, bool>& assignment) const;
};

inline constexpr std::size_t joint_table_limit = 20;

/// Compiled form of a desugared program for evaluating many worlds.
class WorldEvaluator {
 public:
  /// Throws Error(cyclic_program) for cyclic programs.
  explicit WorldEvaluator(const DesugaredProgram& program);

  /// `externals[i]` is the value of program.facts[i]; the result holds the
  /// value of program.internals[j] at position j.
  std::vector<std::uint8_t> evaluate(std::span<const std::uint8_t> externals) const;

 private:
  struct Rule {
    std::vector<std::pair<std::size_t, bool>> body;  // internal index, polarity
    std::vector<std::size_t> facts;
  };
  std::size_t internal_count_ = 0;
  std::size_t fact_count_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<Rule>> rules_;  // by internal index
};

/// Solves the clause equations for one external world in topological order.
/// Throws Error(cyclic_program) for cyclic programs and
/// Error(invalid_argument) when the world is not total.
Structure evaluate_world(const DesugaredProgram& program, const ExternalWorld& world);

/// Exact probability by enumerating external worlds.  Only the facts that
/// can influence the query are enumerated, and partial worlds that agree on
/// every already-decided internal proposition are merged.
QueryResult probability(const DesugaredProgram& program, const Formula& query,
                        const EngineOptions& options = {});
QueryResult probability(const Program& program, const Formula& query,
                        const EngineOptions& options = {});

/// pi(query & evidence) / pi(evidence).  Throws Error(undefined_conditional)
/// when the evidence has probability zero.
QueryResult conditional(const DesugaredProgram& program, const Formula& query,
                        const Formula& evidence, const EngineOptions& options = {});
QueryResult conditional(const Program& program, const Formula& query, const Formula& evidence,
                        const EngineOptions& options = {});

JointTable joint_table(const DesugaredProgram& program, const EngineOptions& options = {});
JointTable joint_table(const Program& program, const EngineOptions& options = {});

/// Conjunction of the literals of an assignment.
Formula conjunction_of(const std::map<std::string, bool>& assignment);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace plc
