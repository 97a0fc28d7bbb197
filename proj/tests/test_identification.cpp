#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "plc/error.hpp"
#include "plc/graph.hpp"
#include "plc/identification.hpp"
#include "plc/parser.hpp"

using namespace plc;

namespace {

const char* const p1_text = "0.5 :: treatment.\n0.5 :: recovery.\n0.4 :: recovery :- treatment.\n";
const char* const p2_text =
    "0.5 :: treatment.\n0.7 :: recovery :- treatment.\n0.5 :: recovery :- \\+ treatment.\n";

IndTable table_of(std::vector<std::string> parents, std::vector<double> values) {
  return {"h", std::move(parents), std::move(values), {}};
}

ErrorCode code_of(const auto& action) {
  try {
    action();
  } catch (const Error& error) {
    return error.code();
  }
  FAIL("no error thrown");
  return ErrorCode::usage;
}

}  // namespace

TEST_CASE("ind tables from the exact oracle") {
  const ExactOracle hidden(parse_program(p1_text));
  const auto table = ind_function(hidden, "recovery", {"treatment"});
  REQUIRE(table.values.size() == 2);
  CHECK(table.values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(table.values[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(table.value({"treatment"}) == table.values[1]);

  const ExactOracle single(parse_program("0.5 :: p."));
  CHECK(ind_function(single, "p", {}).values == std::vector<double>{0.5});

  const ExactOracle silent(Program({{"a", {}, 0.5}}, {"b"}));
  CHECK(ind_function(silent, "b", {"a"}).values == std::vector<double>{0.0, 0.0});
}

TEST_CASE("oracle failures name the subset") {
  // b is only ever true together with a, so {b} alone is impossible.
  const ExactOracle hidden(parse_program("0.5 :: a.\n0.5 :: b :- a.\n0.5 :: c :- a.\n0.5 :: c :- b."));
  try {
    ind_function(hidden, "c", {"a", "b"});
    FAIL("expected an oracle failure");
  } catch (const Error& error) {
    CHECK(error.code() == ErrorCode::oracle_failure);
    CHECK(std::string(error.what()).find("subset {b}") != std::string::npos);
  }
  CHECK(code_of([&] { ind_function(hidden, "c", {"a", "b"}, 1); }) == ErrorCode::size_cap);
}

TEST_CASE("peeling noisy-or bodies") {
  const auto single = detect_and_solve(table_of({"t"}, {0.5, 0.7}));
  REQUIRE(single.clauses.size() == 2);
  CHECK(single.clauses[0].causes.empty());
  CHECK(single.clauses[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(single.clauses[1].causes == std::vector<std::string>{"t"});
  CHECK(single.clauses[1].probability == doctest::Approx(0.4).epsilon(1e-12));

  // 0.44 = 1 - 0.7 * 0.8: explained by the two singletons, no joint body.
  const auto pair = detect_and_solve(table_of({"a", "b"}, {0.0, 0.3, 0.2, 0.44}));
  REQUIRE(pair.clauses.size() == 2);
  CHECK(pair.clauses[0].causes == std::vector<std::string>{"a"});
  CHECK(pair.clauses[0].probability == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(pair.clauses[1].causes == std::vector<std::string>{"b"});
  CHECK(pair.clauses[1].probability == doctest::Approx(0.2).epsilon(1e-12));
  REQUIRE(pair.residuals.size() == 4);
  CHECK(pair.residuals[3].causes == std::vector<std::string>{"a", "b"});
  CHECK_FALSE(pair.residuals[3].accepted);
  CHECK(std::abs(pair.residuals[3].residual()) <= 1e-12);

  CHECK(detect_and_solve(table_of({"a", "b"}, {0, 0, 0, 0})).clauses.empty());
}

TEST_CASE("peeling refuses impossible tables") {
  CHECK(code_of([] { detect_and_solve(table_of({"a"}, {0.6, 0.4})); }) == ErrorCode::non_monotone);
  CHECK(code_of([] { detect_and_solve(table_of({"a"}, {0.5, 1.5})); }) == ErrorCode::invalid_argument);
  // A certain value leaves nothing for larger subsets to explain.
  const auto certain = detect_and_solve(table_of({"a"}, {1.0, 1.0}));
  REQUIRE(certain.clauses.size() == 1);
  CHECK(certain.clauses[0].clamped);
  CHECK(code_of([] { detect_and_solve(table_of({"a"}, {0.5})); }) == ErrorCode::invalid_argument);
}

TEST_CASE("solved probabilities are clamped") {
  const auto d = detect_and_solve(table_of({}, {1.0 - 1e-12}));
  REQUIRE(d.clauses.size() == 1);
  CHECK(d.clauses[0].clamped);
  CHECK(d.clauses[0].probability == 1.0 - 1e-9);
}

TEST_CASE("empirical tolerances grow with uncertainty") {
  IndTable noisy{"h", {"a"}, {0.50, 0.52}, {100, 100}};
  const auto fixed = detect_and_solve(noisy);
  CHECK(fixed.clauses.size() == 2);
  const auto own = detect_and_solve(noisy, {DetectionTolerance::Rule::value_standard_error, 1e-9, 3.0});
  CHECK(own.clauses.size() == 1);
  const auto residual = detect_and_solve(noisy, DetectionTolerance::empirical());
  CHECK(residual.clauses.size() == 1);
  CHECK(residual.residuals[1].tolerance > own.residuals[1].tolerance);

  // A dip well inside the noise is not a contradiction.
  IndTable dip{"h", {"a"}, {0.50, 0.47}, {100, 100}};
  CHECK(detect_and_solve(dip, DetectionTolerance::empirical()).clauses.size() == 1);
  CHECK(code_of([&] { detect_and_solve(dip); }) == ErrorCode::non_monotone);
}

TEST_CASE("reconstructing the fixtures") {
  const Program p1 = parse_program(p1_text);
  const auto result = reconstruct(ExactOracle(p1), p1.graph());
  CHECK(result.complete());
  CHECK(same_structure(result.program, p1));
  CHECK(max_probability_difference(result.program, p1) <= 1e-9);

  const auto from_p2 = reconstruct(ExactOracle(parse_program(p2_text)), p1.graph());
  CHECK(same_structure(from_p2.program, p1));
  CHECK(max_probability_difference(from_p2.program, p1) <= 1e-9);

  const ClassDependencyGraph lone({"p"}, {});
  const auto fact = reconstruct(ExactOracle(parse_program("0.5 :: p.")), lone);
  CHECK(fact.program == parse_program("0.5 :: p."));
}

TEST_CASE("per-node failures are collected") {
  const Program p = parse_program("0.5 :: a.\n0.5 :: b :- \\+a.");
  const auto result = reconstruct(ExactOracle(p), p.graph());
  CHECK_FALSE(result.complete());
  CHECK(result.failed_nodes() == std::vector<std::string>{"b"});
  CHECK(result.nodes.at("b").failure->code() == ErrorCode::non_monotone);
  CHECK(result.program.clauses_for("a").size() == 1);
  CHECK(result.program.contains("b"));
  const auto json = result.diagnostics();
  CHECK(json["b"]["failure"]["code"] == "non-monotone");
  CHECK(json["a"]["failure"].is_null());
  CHECK(json["a"]["ind_table"].size() == 1);

  const ClassDependencyGraph wider({"a", "z"}, {{"a", "z"}});
  const auto uncovered = reconstruct(ExactOracle(parse_program("0.5 :: a.")), wider);
  CHECK(uncovered.failed_nodes() == std::vector<std::string>{"z"});
}

TEST_CASE("round trip on random positive programs") {
  gen::Rng rng(2024);
  for (int i = 0; i < 40; ++i) {
    const Program p = gen::positive_program(rng);
    const auto result = reconstruct(ExactOracle(p), p.graph());
    REQUIRE(result.complete());
    CHECK(same_structure(result.program, p));
    CHECK(max_probability_difference(result.program, p) < 1e-6);
    CHECK(result.program.graph().is_subgraph_of(p.graph()));
  }
}

TEST_CASE("ind values follow the noisy-or formula") {
  gen::Rng rng(404);
  for (int i = 0; i < 40; ++i) {
    const Program p = gen::positive_program(rng);
    const ExactOracle hidden(p);
    const auto graph = p.graph();
    for (const auto& node : graph.nodes()) {
      const auto table = ind_function(hidden, node, graph.parents(node));
      for (std::uint32_t mask = 0; mask < table.values.size(); ++mask) {
        CHECK(std::abs(table.values[mask] - oracle::noisy_or(p, node, table.subset(mask))) <= 1e-9);
      }
    }
  }
}

TEST_CASE("reconstruction preserves the distribution") {
  gen::Rng rng(17);
  int complete = 0, negative = 0;
  for (int i = 0; i < 300; ++i) {
    const Program p = gen::general_program(rng, {4, 2, 8, true});
    const auto result = reconstruct(ExactOracle(p), p.graph());
    CHECK(result.program.graph().is_subgraph_of(p.graph()));
    if (!result.complete()) continue;
    ++complete;
    const bool positive = std::all_of(p.clauses().begin(), p.clauses().end(), [](const Clause& c) {
      return std::all_of(c.causes.begin(), c.causes.end(), [](const Literal& l) { return l.positive; });
    });
    if (!positive) ++negative;
    const auto expected = oracle::joint(p);
    const auto actual = joint_table(result.program).probabilities;
    REQUIRE(actual.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(std::abs(actual[k] - expected[k]) <= 1e-9);
  }
  CHECK(complete > 50);
  CHECK(negative > 5);
}
