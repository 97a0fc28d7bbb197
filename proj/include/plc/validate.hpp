#pragma once

#include <string>
#include <vector>

namespace plc {

class Program;

struct ValidationReport {
  bool acyclic = true;
  bool positive = true;
  bool proper_normal_form = true;
  std::vector<std::string> diagnostics;

  std::string to_text() const;
  std::string to_json() const;
};

/// Structural checks.  Proper normal form needs every probability strictly
/// inside (0, 1), distinct (effect, causes) pairs and an unconditional clause
/// for every sink of the graph.  Without `strict` a missing sink fact is
/// only reported.
ValidationReport validate(const Program& program, bool strict = true);

}  // namespace plc
