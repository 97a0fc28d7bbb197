#include "plc/validate.hpp"

#include <json.hpp>
#include <set>

#include "plc/graph.hpp"
#include "plc/parser.hpp"
#include "plc/program.hpp"

namespace plc {

ValidationReport validate(const Program& program, bool strict) {
  ValidationReport report;
  const auto graph = program.graph();

  if (auto cycle = graph.find_cycle()) {
    report.acyclic = false;
    std::string walk;
    for (const auto& node : *cycle) walk += walk.empty() ? node : "->" + node;
    report.diagnostics.push_back("cycle: " + walk);
  }

  std::set<std::pair<std::string, std::vector<Literal>>> seen;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const auto& clause = program.clauses()[i];
    const std::string where = "clause " + std::to_string(i + 1) + " (" + clause.effect + ")";
    for (const auto& literal : clause.causes) {
      if (!literal.positive) {
        report.positive = false;
        report.diagnostics.push_back(where + ": negative cause \\+" + literal.atom);
      }
    }
    if (!(clause.probability > 0.0 && clause.probability < 1.0)) {
      report.proper_normal_form = false;
      report.diagnostics.push_back(where + ": probability " +
                                   format_probability(clause.probability) +
                                   " is not strictly inside (0, 1)");
    }
    if (!seen.emplace(clause.effect, clause.causes).second) {
      report.proper_normal_form = false;
      report.diagnostics.push_back(where + ": duplicate (effect, causes) pair");
    }
  }

  for (const auto& sink : graph.sinks()) {
    bool has_fact = false;
    for (const auto& clause : program.clauses()) {
      has_fact = has_fact || (clause.effect == sink && clause.causes.empty());
    }
    if (!has_fact) {
      if (strict) report.proper_normal_form = false;
      report.diagnostics.push_back("sink " + sink + ": no unconditional clause" +
                                   (strict ? "" : " (not enforced)"));
    }
  }
  return report;
}

std::string ValidationReport::to_text() const {
  auto yes_no = [](bool value) { return value ? "yes" : "no"; };
  std::string out;
  out += std::string("acyclic: ") + yes_no(acyclic) + "\n";
  out += std::string("positive: ") + yes_no(positive) + "\n";
  out += std::string("proper normal form: ") + yes_no(proper_normal_form) + "\n";
  for (const auto& line : diagnostics) out += "- " + line + "\n";
  return out;
}

std::string ValidationReport::to_json() const {
  nlohmann::json json = {{"acyclic", acyclic},
                         {"positive", positive},
                         {"proper_normal_form", proper_normal_form},
                         {"diagnostics", diagnostics}};
  return json.dump();
}

}  // namespace plc
