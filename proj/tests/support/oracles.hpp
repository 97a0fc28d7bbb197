#pragma once

// Reference implementations used only by the tests.  They share no code
// with the library beyond the Program data type: worlds are enumerated over
// clause firings directly and internal values are found by fixpoint
// iteration instead of topological evaluation.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "plc/program.hpp"

namespace oracle {

using Assignment = std::map<std::string, bool>;
using Predicate = std::function<bool(const Assignment&)>;

struct World {
  std::vector<bool> fired;  // one entry per clause, in program order
  double weight = 1.0;
};

/// Every one of the 2^|clauses| firing patterns with its weight.
std::vector<World> all_worlds(const plc::Program& program);

/// Internal values for one firing pattern; propositions in `forced` are
/// pinned and their clauses ignored.
Assignment solve(const plc::Program& program, const std::vector<bool>& fired,
                 const Assignment& forced = {});

double probability(const plc::Program& program, const Predicate& query,
                   const Assignment& forced = {});
double conditional(const plc::Program& program, const Predicate& query, const Predicate& evidence);

/// Evidence judged in the unforced world, query in the forced world, both
/// driven by the same firing pattern.
double counterfactual(const plc::Program& program, const Predicate& query,
                      const Assignment& evidence, const Assignment& forced);

/// Probability of every assignment to the program's propositions; bit j of
/// the index is propositions()[j].
std::vector<double> joint(const plc::Program& program);

/// 1 - prod(1 - p) over clauses for `target` whose causes lie inside `active`.
double noisy_or(const plc::Program& program, const std::string& target,
                const std::vector<std::string>& active);

Predicate holds(const Assignment& literals);

}  // namespace oracle
