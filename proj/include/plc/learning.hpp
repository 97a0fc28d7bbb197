#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plc/graph.hpp"
#include "plc/identification.hpp"
#include "plc/program.hpp"

namespace plc {

/// SplitMix64.  Row r of a sample drawn with seed s uses its own stream,
/// seeded with mix(s) + (r + 1) * 0x9E3779B97F4A7C15, so rows can be drawn
/// in any order or in parallel with identical results.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 for_row(std::uint64_t seed, std::uint64_t row);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 bits.
  double uniform();

 private:
  std::uint64_t state_;
};

struct Provenance {
  std::string program_hash;
  std::uint64_t seed = 0;
  std::size_t rows = 0;

  bool operator==(const Provenance&) const = default;
};

/// Sampled truth values of internal propositions, one row per sample.
class Dataset {
 public:
  Dataset() = default;
  /// Throws Error(invalid_argument) for duplicate or invalid column names.
  explicit Dataset(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t row_count() const { return row_count_; }

  std::optional<std::size_t> column_index(std::string_view name) const;
  bool at(std::size_t row, std::size_t column) const {
    return cells_[row * columns_.size() + column] != 0;
  }
  /// Appends a row; throws Error(invalid_argument) on a width mismatch.
  void add_row(const std::vector<bool>& values);

  const std::optional<Provenance>& provenance() const { return provenance_; }
  void set_provenance(Provenance provenance) { provenance_ = std::move(provenance); }

  /// Header line of names, then 0/1 cells; a leading
  /// `# provenance: program=HASH seed=S n=N` line when provenance is known.
  std::string to_csv() const;
  static Dataset from_csv(std::string_view text);

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> columns_;
  std::vector<std::uint8_t> cells_;
  std::size_t row_count_ = 0;
  std::optional<Provenance> provenance_;
};

/// FNV-1a (64 bit) of the canonical program text, as 16 hex digits.
std::string program_hash(const Program& program);

/// n independent samples: each random fact is drawn with its probability
/// and the internal propositions follow from the clauses.  Columns are the
/// program's propositions in name order.
Dataset forward_sample(const Program& program, std::size_t n, std::uint64_t seed);

inline constexpr std::size_t default_min_support = 30;

/// Relative frequencies s_T / n_T from a dataset.  Parent patterns seen
/// fewer than `min_support` times are refused with Error(starved_pattern).
class FrequencyOracle : public Oracle {
 public:
  FrequencyOracle(Dataset data, std::size_t min_support = default_min_support);

  struct Counts {
    std::size_t matching = 0;  // n_T
    std::size_t positive = 0;  // s_T
  };

  Counts counts(const std::string& target, const std::map<std::string, bool>& parents) const;

  bool covers(const std::string& node) const override;
  OracleAnswer conditional(const std::string& target,
                           const std::map<std::string, bool>& parents) const override;

  std::size_t min_support() const { return min_support_; }

 private:
  Dataset data_;
  std::size_t min_support_;
};

FrequencyOracle empirical_oracle(const Dataset& data,
                                 std::size_t min_support = default_min_support);

struct LearningOptions {
  std::size_t min_support = default_min_support;
  DetectionTolerance tolerance = DetectionTolerance::empirical();
  std::size_t max_parents = default_max_parents;
};

/// Reconstruction with the frequency oracle.  Throws Error(invalid_argument)
/// when the dataset lacks a column for some graph node.
ReconstructionResult learn(const Dataset& data, const ClassDependencyGraph& graph,
                           const LearningOptions& options = {});

}  // namespace plc
