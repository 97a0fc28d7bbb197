#include "plc/learning.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "plc/error.hpp"
#include "plc/inference.hpp"
#include "plc/parser.hpp"

namespace plc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

SplitMix64 SplitMix64::for_row(std::uint64_t seed, std::uint64_t row) {
  return SplitMix64(mix64(seed) + (row + 1) * golden_gamma);
}

std::uint64_t SplitMix64::next() {
  state_ += golden_gamma;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Dataset::Dataset(std::vector<std::string> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& name : columns_) {
    if (!is_valid_name(name)) {
      throw Error(ErrorCode::invalid_argument, "invalid column name '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate column '" + name + "'");
    }
  }
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

void Dataset::add_row(const std::vector<bool>& values) {
  if (values.size() != columns_.size()) {
    throw Error(ErrorCode::invalid_argument, "row has " + std::to_string(values.size()) +
                                                 " cells, expected " +
                                                 std::to_string(columns_.size()));
  }
  for (bool v : values) cells_.push_back(v ? 1 : 0);
  ++row_count_;
}

std::string Dataset::to_csv() const {
  std::string out;
  if (provenance_) {
    out += "# provenance: program=" + provenance_->program_hash +
           " seed=" + std::to_string(provenance_->seed) +
           " n=" + std::to_string(provenance_->rows) + "\n";
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
  out += '\n';
  for (std::size_t r = 0; r < row_count_; ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += at(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    field.erase(0, field.find_first_not_of(" \t\r"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

Provenance parse_provenance(const std::string& text, std::size_t line) {
  Provenance provenance;
  std::istringstream in(text);
  bool program = false, seed = false, rows = false;
  for (std::string item; in >> item;) {
    auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    auto number = [&](auto& target) {
      auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), target);
      if (ec != std::errc() || end != value.data() + value.size()) {
        throw Error(ErrorCode::syntax, std::to_string(line) + ": malformed provenance " + key);
      }
    };
    if (key == "program") {
      provenance.program_hash = value;
      program = true;
    } else if (key == "seed") {
      number(provenance.seed);
      seed = true;
    } else if (key == "n") {
      number(provenance.rows);
      rows = true;
    }
  }
  if (!program || !seed || !rows) {
    throw Error(ErrorCode::syntax,
                std::to_string(line) + ": provenance needs program=, seed= and n=");
  }
  return provenance;
}

}  // namespace

Dataset Dataset::from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  std::optional<Provenance> provenance;
  std::optional<Dataset> data;
  std::vector<bool> row;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      const std::string tag = "# provenance:";
      if (line.rfind(tag, 0) == 0 && !data) {
        provenance = parse_provenance(line.substr(tag.size()), number);
      }
      continue;
    }
    auto fields = split_fields(line);
    if (!data) {
      try {
        data.emplace(fields);
      } catch (const Error& error) {
        throw Error(ErrorCode::syntax, std::to_string(number) + ": " + error.what());
      }
      continue;
    }
    if (fields.size() != data->columns().size()) {
      throw Error(ErrorCode::syntax, std::to_string(number) + ": expected " +
                                         std::to_string(data->columns().size()) +
                                         " cells, found " + std::to_string(fields.size()));
    }
    row.assign(fields.size(), false);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c] != "0" && fields[c] != "1") {
        throw Error(ErrorCode::syntax, std::to_string(number) + ": cell '" + fields[c] +
                                           "' in column " + data->columns()[c] +
                                           " is not 0 or 1");
      }
      row[c] = fields[c] == "1";
    }
    data->add_row(row);
  }
  if (!data) throw Error(ErrorCode::syntax, "dataset has no header line");
  if (provenance) data->set_provenance(*provenance);
  return *data;
}

std::string program_hash(const Program& program) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : print_program(program)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

Dataset forward_sample(const Program& program, std::size_t n, std::uint64_t seed) {
  const DesugaredProgram expanded = desugar(program);
  const WorldEvaluator evaluator(expanded);
  Dataset data(program.propositions());
  std::vector<std::uint8_t> externals(expanded.facts.size());
  std::vector<bool> row(expanded.internals.size());
  for (std::size_t r = 0; r < n; ++r) {
    auto stream = SplitMix64::for_row(seed, r);
    for (std::size_t f = 0; f < expanded.facts.size(); ++f) {
      externals[f] = stream.uniform() < expanded.facts[f].probability ? 1 : 0;
    }
    const auto values = evaluator.evaluate(externals);
    for (std::size_t i = 0; i < values.size(); ++i) row[i] = values[i] != 0;
    data.add_row(row);
  }
  data.set_provenance({program_hash(program), seed, n});
  return data;
}

FrequencyOracle::FrequencyOracle(Dataset data, std::size_t min_support)
    : data_(std::move(data)), min_support_(min_support) {}

bool FrequencyOracle::covers(const std::string& node) const {
  return data_.column_index(node).has_value();
}

FrequencyOracle::Counts FrequencyOracle::counts(const std::string& target,
                                                const std::map<std::string, bool>& parents) const {
  auto column = [this](const std::string& name) {
    auto index = data_.column_index(name);
    if (!index) {
      throw Error(ErrorCode::oracle_failure, "dataset has no column '" + name + "'");
    }
    return *index;
  };
  const std::size_t target_column = column(target);
  std::vector<std::pair<std::size_t, bool>> pattern;
  for (const auto& [name, value] : parents) pattern.emplace_back(column(name), value);

  Counts counts;
  for (std::size_t r = 0; r < data_.row_count(); ++r) {
    bool match = true;
    for (const auto& [c, value] : pattern) {
      if (data_.at(r, c) != value) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    ++counts.matching;
    if (data_.at(r, target_column)) ++counts.positive;
  }
  return counts;
}

OracleAnswer FrequencyOracle::conditional(const std::string& target,
                                          const std::map<std::string, bool>& parents) const {
  const auto c = counts(target, parents);
  if (c.matching < min_support_ || c.matching == 0) {
    std::string pattern = "{";
    for (const auto& [name, value] : parents) {
      pattern += (pattern.size() > 1 ? "," : "") + name + "=" + (value ? "1" : "0");
    }
    throw Error(ErrorCode::starved_pattern, pattern + "} (n=" + std::to_string(c.matching) +
                                                " < " + std::to_string(min_support_) + ")");
  }
  return {static_cast<double>(c.positive) / static_cast<double>(c.matching), c.matching};
}

FrequencyOracle empirical_oracle(const Dataset& data, std::size_t min_support) {
  return FrequencyOracle(data, min_support);
}

ReconstructionResult learn(const Dataset& data, const ClassDependencyGraph& graph,
                           const LearningOptions& options) {
  for (const auto& node : graph.nodes()) {
    if (!data.column_index(node)) {
      throw Error(ErrorCode::invalid_argument, "dataset has no column for graph node '" + node + "'");
    }
  }
  const FrequencyOracle oracle(data, options.min_support);
  return reconstruct(oracle, graph, {options.tolerance, options.max_parents});
}

}  // namespace plc
