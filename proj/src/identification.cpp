#include "plc/identification.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "plc/parser.hpp"

namespace plc {

namespace {

std::string show_subset(const std::vector<std::string>& names) {
  std::string text = "{";
  for (std::size_t i = 0; i < names.size(); ++i) text += (i ? "," : "") + names[i];
  return text + "}";
}

std::string show_pattern(const std::map<std::string, bool>& pattern) {
  std::string text = "{";
  bool first = true;
  for (const auto& [name, value] : pattern) {
    text += (first ? "" : ",") + name + "=" + (value ? "1" : "0");
    first = false;
  }
  return text + "}";
}

}  // namespace

OracleAnswer ExactOracle::conditional(const std::string& target,
                                      const std::map<std::string, bool>& parents) const {
  try {
    return {plc::conditional(hidden_, Formula::atom(target), conjunction_of(parents), options_)
                .probability,
            std::nullopt};
  } catch (const Error& error) {
    throw Error(ErrorCode::oracle_failure, "pi(" + target + " | " + show_pattern(parents) +
                                               ") is not available: " + error.what());
  }
}

std::vector<std::string> IndTable::subset(std::uint32_t mask) const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    if ((mask >> j) & 1U) names.push_back(parents[j]);
  }
  return names;
}

double IndTable::value(const std::vector<std::string>& names) const {
  std::uint32_t mask = 0;
  for (const auto& name : names) {
    auto it = std::find(parents.begin(), parents.end(), name);
    if (it == parents.end()) {
      throw Error(ErrorCode::invalid_argument, "'" + name + "' is not a parent of " + target);
    }
    mask |= std::uint32_t{1} << (it - parents.begin());
  }
  return values.at(mask);
}

IndTable ind_function(const Oracle& oracle, const std::string& target,
                      std::vector<std::string> parents, std::size_t max_parents) {
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  if (parents.size() > max_parents || parents.size() >= 32) {
    throw Error(ErrorCode::size_cap, target + " has " + std::to_string(parents.size()) +
                                         " parents; the limit is " +
                                         std::to_string(max_parents));
  }
  IndTable table{target, parents, {}, {}};
  const std::uint32_t count = std::uint32_t{1} << parents.size();
  table.values.resize(count);
  std::vector<std::string> starved;
  bool with_support = false;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::map<std::string, bool> pattern;
    for (std::size_t j = 0; j < parents.size(); ++j) pattern[parents[j]] = (mask >> j) & 1U;
    try {
      const auto answer = oracle.conditional(target, pattern);
      table.values[mask] = answer.value;
      if (answer.support) {
        if (!with_support) table.support.assign(count, 0);
        with_support = true;
        table.support[mask] = *answer.support;
      }
    } catch (const Error& error) {
      if (error.code() == ErrorCode::starved_pattern) {
        starved.push_back(std::string(error.what()));
        continue;
      }
      throw Error(error.code(),
                  target + ", subset " + show_subset(table.subset(mask)) + ": " + error.what());
    }
  }
  if (!starved.empty()) {
    std::string message = target + ": " + std::to_string(starved.size()) +
                          " parent pattern(s) below minimum support:";
    for (const auto& line : starved) message += " " + line + ";";
    message.pop_back();
    throw Error(ErrorCode::starved_pattern, message);
  }
  return table;
}

Detection detect_and_solve(const IndTable& table, const DetectionTolerance& tolerance) {
  const std::size_t k = table.parents.size();
  const std::uint32_t count = std::uint32_t{1} << k;
  if (table.values.size() != count) {
    throw Error(ErrorCode::invalid_argument,
                "table for " + table.target + " is incomplete: " +
                    std::to_string(table.values.size()) + " of " + std::to_string(count) +
                    " subsets");
  }
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (!(table.values[mask] >= 0.0 && table.values[mask] <= 1.0)) {
      throw Error(ErrorCode::invalid_argument,
                  table.target + ", subset " + show_subset(table.subset(mask)) + ": value " +
                      format_probability(table.values[mask]) + " is not a probability");
    }
  }
  const bool has_support = table.support.size() == count;

  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&table](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return table.subset(a) < table.subset(b);
  });

  // Smoothed estimate used only for variances, so empty or full counts
  // never yield a zero variance.
  auto smoothed = [&](std::uint32_t mask) {
    const double n = static_cast<double>(table.support[mask]);
    return (table.values[mask] * n + 0.5) / (n + 1.0);
  };
  auto value_variance = [&](std::uint32_t mask) {
    const double v = smoothed(mask);
    return v * (1.0 - v) / std::max<double>(1.0, static_cast<double>(table.support[mask]));
  };
  auto log_survival_variance = [&](std::uint32_t mask) {
    const double v = smoothed(mask);
    return v / ((1.0 - v) * std::max<double>(1.0, static_cast<double>(table.support[mask])));
  };

  struct Accepted {
    std::uint32_t mask;
    double probability;
    // log(1 - p) as a linear combination of log(1 - value(S)).
    std::map<std::uint32_t, double> coefficients;
  };
  std::vector<Accepted> accepted;
  Detection detection;

  for (const std::uint32_t subset : order) {
    double survival = 1.0;
    std::map<std::uint32_t, double> prediction;
    for (const auto& clause : accepted) {
      if ((clause.mask & subset) != clause.mask || clause.mask == subset) continue;
      survival *= 1.0 - clause.probability;
      for (const auto& [mask, c] : clause.coefficients) prediction[mask] += c;
    }
    const double predicted = 1.0 - survival;
    const double value = table.values[subset];

    double tau = tolerance.threshold;
    if (has_support && tolerance.rule != DetectionTolerance::Rule::fixed) {
      double variance = value_variance(subset);
      if (tolerance.rule == DetectionTolerance::Rule::residual_standard_error) {
        double log_variance = 0.0;
        for (const auto& [mask, c] : prediction) log_variance += c * c * log_survival_variance(mask);
        variance += survival * survival * log_variance;
      }
      tau = std::max(tau, tolerance.z * std::sqrt(variance));
    }

    SubsetDiagnostic diagnostic{table.subset(subset), value, predicted, tau, false};
    const std::string where = table.target + ", subset " + show_subset(diagnostic.causes);
    if (value - predicted > tau) {
      if (survival <= tau) {
        throw Error(ErrorCode::saturation,
                    where + ": prediction " + format_probability(predicted) +
                        " is saturated but the observed value is " + format_probability(value));
      }
      double p = 1.0 - (1.0 - value) / survival;
      const double floor = tolerance.threshold;
      const bool clamped = p < floor || p > 1.0 - floor;
      p = std::clamp(p, floor, 1.0 - floor);
      if (!std::isfinite(p)) {
        throw Error(ErrorCode::saturation, where + ": parameter is not finite");
      }
      Accepted clause{subset, p, {}};
      clause.coefficients[subset] = 1.0;
      for (const auto& [mask, c] : prediction) clause.coefficients[mask] -= c;
      accepted.push_back(std::move(clause));
      detection.clauses.push_back({diagnostic.causes, p, clamped});
      diagnostic.accepted = true;
    } else if (predicted - value > tau) {
      throw Error(ErrorCode::non_monotone,
                  where + ": observed " + format_probability(value) + " is below the prediction " +
                      format_probability(predicted) + " from its subsets (tolerance " +
                      format_probability(tau) + ")");
    }
    detection.residuals.push_back(std::move(diagnostic));
  }
  return detection;
}

bool ReconstructionResult::complete() const {
  return std::all_of(nodes.begin(), nodes.end(),
                     [](const auto& entry) { return !entry.second.failure.has_value(); });
}

std::vector<std::string> ReconstructionResult::failed_nodes() const {
  std::vector<std::string> names;
  for (const auto& [name, report] : nodes) {
    if (report.failure) names.push_back(name);
  }
  return names;
}

nlohmann::json ReconstructionResult::diagnostics() const {
  nlohmann::json json = nlohmann::json::object();
  for (const auto& [name, report] : nodes) {
    nlohmann::json node;
    node["parents"] = report.parents;
    node["ind_table"] = nlohmann::json::array();
    if (report.table) {
      const auto& table = *report.table;
      for (std::uint32_t mask = 0; mask < table.values.size(); ++mask) {
        nlohmann::json entry = {{"subset", table.subset(mask)}, {"value", table.values[mask]}};
        if (!table.support.empty()) entry["support"] = table.support[mask];
        node["ind_table"].push_back(entry);
      }
    }
    node["accepted_clauses"] = nlohmann::json::array();
    for (const auto& clause : report.detection.clauses) {
      node["accepted_clauses"].push_back(
          {{"causes", clause.causes}, {"probability", clause.probability}, {"clamped", clause.clamped}});
    }
    node["residuals"] = nlohmann::json::array();
    for (const auto& r : report.detection.residuals) {
      node["residuals"].push_back({{"subset", r.causes},
                                   {"value", r.value},
                                   {"predicted", r.predicted},
                                   {"residual", r.residual()},
                                   {"tolerance", r.tolerance},
                                   {"accepted", r.accepted}});
    }
    if (report.failure) {
      node["failure"] = {{"code", std::string(to_string(report.failure->code()))},
                         {"message", report.failure->what()}};
    } else {
      node["failure"] = nullptr;
    }
    json[name] = std::move(node);
  }
  return json;
}

ReconstructionResult reconstruct(const Oracle& oracle, const ClassDependencyGraph& graph,
                                 const ReconstructionOptions& options) {
  ReconstructionResult result;
  std::vector<Clause> clauses;
  for (const auto& node : graph.topological_order()) {
    NodeReport report{node, graph.parents(node), std::nullopt, {}, std::nullopt};
    try {
      for (const auto& name : report.parents) {
        if (!oracle.covers(name)) {
          throw Error(ErrorCode::oracle_failure, "oracle does not cover parent '" + name + "'");
        }
      }
      if (!oracle.covers(node)) {
        throw Error(ErrorCode::oracle_failure, "oracle does not cover '" + node + "'");
      }
      report.table = ind_function(oracle, node, report.parents, options.max_parents);
      report.detection = detect_and_solve(*report.table, options.tolerance);
      for (const auto& detected : report.detection.clauses) {
        Clause clause{node, {}, detected.probability};
        for (const auto& cause : detected.causes) clause.causes.push_back({cause, true});
        clauses.push_back(std::move(clause));
      }
    } catch (const Error& error) {
      report.failure = error;
    }
    result.nodes.emplace(node, std::move(report));
  }
  result.program = Program(std::move(clauses), graph.nodes());
  return result;
}

}  // namespace plc
