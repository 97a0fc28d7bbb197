#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plc/error.hpp"
#include "plc/graph.hpp"
#include "plc/inference.hpp"
#include "plc/program.hpp"

namespace plc {

struct OracleAnswer {
  double value = 0.0;
  /// Number of samples behind the estimate; empty for exact answers.
  std::optional<std::size_t> support;
};

/// Answers pi(target | every parent fixed to the given value).
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual bool covers(const std::string& node) const = 0;
  virtual OracleAnswer conditional(const std::string& target,
                                   const std::map<std::string, bool>& parents) const = 0;
};

/// Exact answers from a known program through the inference engine.
class ExactOracle : public Oracle {
 public:
  explicit ExactOracle(Program hidden, EngineOptions options = {})
      : hidden_(std::move(hidden)), options_(options) {}

  bool covers(const std::string& node) const override { return hidden_.contains(node); }
  OracleAnswer conditional(const std::string& target,
                           const std::map<std::string, bool>& parents) const override;

 private:
  Program hidden_;
  EngineOptions options_;
};

/// For a node h with ordered parents, the probability of h for every subset
/// T of the parents set true (the rest false).  Entry i corresponds to the
/// subset whose bit j selects parents[j].
struct IndTable {
  std::string target;
  std::vector<std::string> parents;
  std::vector<double> values;
  std::vector<std::size_t> support;  // empty unless estimated from data

  std::vector<std::string> subset(std::uint32_t mask) const;
  double value(const std::vector<std::string>& subset) const;
};

inline constexpr std::size_t default_max_parents = 12;

/// Queries `oracle` for every subset of `parents`.  Patterns the oracle
/// cannot answer are reported together in one Error naming each subset.
IndTable ind_function(const Oracle& oracle, const std::string& target,
                      std::vector<std::string> parents,
                      std::size_t max_parents = default_max_parents);

/// How large a residual must be before a subset is accepted as a body.
struct DetectionTolerance {
  enum class Rule {
    /// A fixed threshold for every subset.
    fixed,
    /// z * sqrt(v(1 - v) / n_T): the standard error of the subset's own
    /// estimate.
    value_standard_error,
    /// z * the standard error of value - predicted, adding the variance
    /// that the prediction inherits from the estimates of strict subsets
    /// (delta method; estimates of different subsets use disjoint rows).
    residual_standard_error,
  };

  Rule rule = Rule::fixed;
  double threshold = 1e-9;  // fixed rule, and the floor for the others
  double z = 3.0;

  static DetectionTolerance exact() { return {}; }
  static DetectionTolerance empirical(double z = 4.0) {
    return {Rule::residual_standard_error, 1e-9, z};
  }
};

struct DetectedClause {
  std::vector<std::string> causes;
  double probability = 0.0;
  bool clamped = false;
};

struct SubsetDiagnostic {
  std::vector<std::string> causes;
  double value = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  bool accepted = false;

  double residual() const { return value - predicted; }
};

struct Detection {
  std::vector<DetectedClause> clauses;
  std::vector<SubsetDiagnostic> residuals;
};

/// Noisy-OR peeling.  Subsets are visited by increasing size (ties
/// lexicographic); each is predicted from the clauses already accepted on
/// strict subsets, and accepted as a body when the observed value exceeds
/// the prediction by more than the tolerance.  Its probability solves
/// 1 - value = (1 - predicted)(1 - p).
///
/// Throws Error(saturation) when the prediction is already within the
/// tolerance of 1 but the value still exceeds it, and Error(non_monotone)
/// when a value falls below its prediction by more than the tolerance.
Detection detect_and_solve(const IndTable& table,
                           const DetectionTolerance& tolerance = DetectionTolerance::exact());

struct NodeReport {
  std::string node;
  std::vector<std::string> parents;
  std::optional<IndTable> table;
  Detection detection;
  std::optional<Error> failure;
};

struct ReconstructionOptions {
  DetectionTolerance tolerance = DetectionTolerance::exact();
  std::size_t max_parents = default_max_parents;
};

struct ReconstructionResult {
  /// Clauses of every node that succeeded; all graph nodes are declared.
  Program program;
  std::map<std::string, NodeReport> nodes;

  bool complete() const;
  std::vector<std::string> failed_nodes() const;
  nlohmann::json diagnostics() const;
};

/// Rebuilds a positive program node by node from the graph and the oracle.
/// Per-node failures are collected rather than thrown.  Throws
/// Error(cyclic_program) for a cyclic graph.
ReconstructionResult reconstruct(const Oracle& oracle, const ClassDependencyGraph& graph,
                                 const ReconstructionOptions& options = {});

}  // namespace plc
