#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "plc/causal.hpp"
#include "plc/error.hpp"
#include "plc/graph.hpp"
#include "plc/parser.hpp"

using namespace plc;

namespace {

const char* const p1_text = "0.5 :: treatment.\n0.5 :: recovery.\n0.4 :: recovery :- treatment.\n";
const char* const p2_text =
    "0.5 :: treatment.\n0.7 :: recovery :- treatment.\n0.5 :: recovery :- \\+ treatment.\n";

oracle::Predicate as_predicate(const Formula& formula) {
  return [formula](const oracle::Assignment& values) {
    return formula.evaluate([&](const std::string& name) { return values.at(name); });
  };
}

bool contains(const std::vector<LogicalClause>& clauses, const LogicalClause& clause) {
  return std::find(clauses.begin(), clauses.end(), clause) != clauses.end();
}

}  // namespace

TEST_CASE("intervening on the expanded treatment program") {
  const auto d = desugar(parse_program(p1_text));
  const auto done = intervene(d, {{{"treatment", true}}});
  CHECK(done.facts == d.facts);
  CHECK(done.clauses.size() == 3);
  CHECK(contains(done.clauses, {"treatment", {}, {}}));
  CHECK_FALSE(contains(done.clauses, {"treatment", {}, {"u1"}}));
  CHECK(contains(done.clauses, {"recovery", {}, {"u2"}}));
  CHECK(contains(done.clauses, {"recovery", {{"treatment", true}}, {"u3"}}));
  CHECK(intervene(d, {}) == d);
}

TEST_CASE("intervening on source programs") {
  const Program p1 = parse_program(p1_text);
  CHECK(intervene(p1, {}) == p1);
  const Program forced = intervene(p1, {{{"treatment", true}}});
  CHECK(forced.clauses_for("treatment") == std::vector<Clause>{{"treatment", {}, 1.0}});
  const Program blocked = intervene(p1, {{{"recovery", false}}});
  CHECK(blocked.clauses_for("recovery").empty());
  CHECK(blocked.contains("recovery"));
  CHECK(probability(blocked, Formula::atom("recovery")).probability == 0.0);
}

TEST_CASE("interventional queries") {
  const Program p1 = parse_program(p1_text);
  const Program p2 = parse_program(p2_text);
  const Intervention treat{{{"treatment", true}}};
  CHECK(std::abs(interventional_query(p1, Formula::atom("recovery"), treat).probability - 0.7) <= 1e-12);
  CHECK(interventional_query(p1, Formula::atom("treatment"), treat).probability == 1.0);
  CHECK(std::abs(interventional_query(p2, Formula::atom("recovery"), treat).probability - 0.7) <= 1e-12);
}

TEST_CASE("twin program of the treatment program") {
  const auto twin = twin_program(parse_program(p1_text), {{{"treatment", true}}});
  const auto& d = twin.expanded();
  CHECK(d.facts == desugar(parse_program(p1_text)).facts);
  CHECK(d.clauses.size() == 6);
  CHECK(contains(d.clauses, {"treatment__e", {}, {"u1"}}));
  CHECK(contains(d.clauses, {"treatment__i", {}, {}}));
  CHECK_FALSE(contains(d.clauses, {"treatment__i", {}, {"u1"}}));
  CHECK(contains(d.clauses, {"recovery__e", {}, {"u2"}}));
  CHECK(contains(d.clauses, {"recovery__i", {}, {"u2"}}));
  CHECK(contains(d.clauses, {"recovery__e", {{"treatment__e", true}}, {"u3"}}));
  CHECK(contains(d.clauses, {"recovery__i", {{"treatment__i", true}}, {"u3"}}));
}

TEST_CASE("twin program with negative causes") {
  const auto twin = twin_program(parse_program(p2_text), {{{"treatment", true}}});
  const auto& d = twin.expanded();
  CHECK(contains(d.clauses, {"recovery__e", {{"treatment__e", false}}, {"u2"}}));
  CHECK(contains(d.clauses, {"recovery__i", {{"treatment__i", false}}, {"u2"}}));
  CHECK_FALSE(contains(d.clauses, {"treatment__i", {}, {"u1"}}));
}

TEST_CASE("empty intervention gives two identical copies") {
  const auto twin = twin_program(parse_program(p2_text), {});
  std::size_t e = 0, i = 0;
  for (const auto& clause : twin.expanded().clauses) {
    (clause.head.ends_with("__e") ? e : i) += 1;
  }
  CHECK(e == 3);
  CHECK(i == 3);
}

TEST_CASE("twin programs export as ordinary programs") {
  const Program p1 = parse_program(p1_text);
  const auto twin = twin_program(p1, {{{"treatment", true}}});
  const Program exported = twin.to_program();
  const Program reread = parse_program(print_program(exported));
  const auto query = parse_formula("recovery__i");
  const auto evidence = parse_formula("!treatment__e & recovery__e");
  CHECK(std::abs(conditional(reread, query, evidence).probability - 1.0) <= 1e-12);

  const Program clash = parse_program("0.5 :: a__e.\n0.5 :: b :- a__e.");
  try {
    twin_program(clash, {}).to_program();
    FAIL("expected a collision");
  } catch (const Error& error) {
    CHECK(error.code() == ErrorCode::name_collision);
  }
}

TEST_CASE("counterfactuals on the fixtures") {
  const Program p1 = parse_program(p1_text);
  const Program p2 = parse_program(p2_text);
  const Evidence seen{{{"treatment", false}, {"recovery", true}}};
  const Intervention treat{{{"treatment", true}}};
  const auto recovery = Formula::atom("recovery");
  CHECK(std::abs(counterfactual_query(p1, recovery, seen, treat).probability - 1.0) <= 1e-12);
  CHECK(std::abs(counterfactual_query(p2, recovery, seen, treat).probability - 0.7) <= 1e-12);
  CHECK(std::abs(counterfactual_query(p1, recovery, {}, treat).probability - 0.7) <= 1e-12);
  try {
    counterfactual_query(p1, recovery, {{{"treatment", true}, {"recovery", false}}},
                         {{{"recovery", true}}});
  } catch (const Error&) {
    FAIL("evidence with positive mass was refused");
  }
  const Program certain = parse_program("1.0 :: a.\n0.5 :: b :- a.");
  try {
    counterfactual_query(certain, Formula::atom("b"), {{{"a", false}}}, {});
    FAIL("expected undefined conditional");
  } catch (const Error& error) {
    CHECK(error.code() == ErrorCode::undefined_conditional);
  }
}

TEST_CASE("counterfactuals agree with the paired-world oracle") {
  gen::Rng rng(77);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Program p = gen::general_program(rng);
    const auto atoms = p.propositions();
    const Formula query = gen::formula(rng, atoms);
    const auto evidence = gen::assignment(rng, atoms, 0, 2);
    const auto forced = gen::assignment(rng, atoms, 0, 2);
    if (oracle::probability(p, oracle::holds(evidence)) <= 1e-9) continue;
    const double expected = oracle::counterfactual(p, as_predicate(query), evidence, forced);
    CHECK(std::abs(counterfactual_query(p, query, {evidence}, {forced}).probability - expected) <=
          1e-12);
    const double intervened = oracle::probability(p, as_predicate(query), forced);
    CHECK(std::abs(interventional_query(p, query, {forced}).probability - intervened) <= 1e-12);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("twin copies keep the original marginals") {
  gen::Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    const Program p = gen::general_program(rng);
    const Formula phi = gen::formula(rng, p.propositions());
    const auto twin = twin_program(p, {});
    const double base = probability(p, phi).probability;
    CHECK(std::abs(probability(twin.expanded(), phi.relabel("__e")).probability - base) <= 1e-12);
    CHECK(std::abs(probability(twin.expanded(), phi.relabel("__i")).probability - base) <= 1e-12);
  }
}

TEST_CASE("empty evidence collapses to intervention, matching evidence to conditioning") {
  gen::Rng rng(55);
  for (int i = 0; i < 100; ++i) {
    const Program p = gen::general_program(rng);
    const auto atoms = p.propositions();
    const Formula phi = gen::formula(rng, atoms);
    const auto forced = gen::assignment(rng, atoms, 1, 2);
    CHECK(std::abs(counterfactual_query(p, phi, {}, {forced}).probability -
                   interventional_query(p, phi, {forced}).probability) <= 1e-12);

    auto evidence = gen::assignment(rng, atoms, 0, 2);
    for (const auto& [name, value] : forced) evidence[name] = value;
    if (oracle::probability(p, oracle::holds(evidence)) <= 1e-9) continue;
    CHECK(std::abs(counterfactual_query(p, phi, {evidence}, {forced}).probability -
                   conditional(p, phi, conjunction_of(evidence)).probability) <= 1e-12);
  }
}

TEST_CASE("observing all parents equals setting them") {
  gen::Rng rng(13);
  for (int i = 0; i < 60; ++i) {
    const Program p = gen::positive_program(rng, {5, 3, 0.05, 0.95, 4});
    const auto graph = p.graph();
    for (const auto& node : graph.nodes()) {
      const auto parents = graph.parents(node);
      std::map<std::string, bool> pattern;
      for (const auto& parent : parents) pattern[parent] = std::bernoulli_distribution(0.5)(rng);
      const auto h = Formula::atom(node);
      const double seen = conditional(p, h, conjunction_of(pattern)).probability;
      const double set = interventional_query(p, h, {pattern}).probability;
      CHECK(std::abs(seen - set) <= 1e-12);
    }
  }
}
