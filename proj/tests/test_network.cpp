#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "sensbound/errors.hpp"
#include "sensbound/network.hpp"
#include "sensbound/sweep.hpp"

using namespace sensbound;

namespace {

const std::string kChainDoc = R"({
  "variables": [
    {"name": "A", "states": ["a1", "a2"]},
    {"name": "B", "states": ["b1", "b2"]}
  ],
  "parents": {"B": ["A"]},
  "cpt": {
    "A": [[0.4, 0.6]],
    "B": [[0.3, 0.7], [0.9, 0.1]]
  }
})";

}  // namespace

TEST_SUITE("network") {

TEST_CASE("loads a two-node chain") {
  DiscreteNetwork net = load_network(kChainDoc);
  CHECK(net.node_count() == 2);
  CHECK(net.variable(0).name == "A");
  CHECK(net.parents(1) == std::vector<int>{0});
  CHECK(net.cpt(1)[1][0] == doctest::Approx(0.9));
}

TEST_CASE("bad row sum is a validation error naming node and row") {
  std::string doc = kChainDoc;
  doc.replace(doc.find("0.7"), 3, "0.68");
  CHECK_THROWS_WITH_AS(load_network(doc), doctest::Contains("'B' cpt row 0"), ValidationError);
}

TEST_CASE("cycles are rejected") {
  const std::string doc = R"({
    "variables": [
      {"name": "A", "states": ["a1", "a2"]},
      {"name": "B", "states": ["b1", "b2"]}
    ],
    "parents": {"A": ["B"], "B": ["A"]},
    "cpt": {"A": [[0.5, 0.5], [0.5, 0.5]], "B": [[0.5, 0.5], [0.5, 0.5]]}
  })";
  CHECK_THROWS_WITH_AS(load_network(doc), doctest::Contains("cycle"), ValidationError);
}

TEST_CASE("shape mismatches name the node") {
  std::string doc = kChainDoc;
  doc.replace(doc.find("[[0.3, 0.7], [0.9, 0.1]]"), 24, "[[0.3, 0.7]]");
  CHECK_THROWS_WITH_AS(load_network(doc), doctest::Contains("'B'"), ValidationError);
}

TEST_CASE("broken json is a parse error") {
  CHECK_THROWS_AS(load_network("{ not json"), ParseError);
  CHECK_THROWS_AS(load_network(R"({"variables": 3, "cpt": {}})"), ParseError);
}

TEST_CASE("loader keeps 15 significant digits") {
  std::string doc = R"({
    "variables": [{"name": "A", "states": ["a1", "a2"]}],
    "cpt": {"A": [[0.123456789012345, 0.876543210987655]]}
  })";
  DiscreteNetwork net = load_network(doc);
  CHECK(net.cpt(0)[0][0] == doctest::Approx(0.123456789012345).epsilon(1e-15));
}

TEST_CASE("save/load round trip preserves the network") {
  DiscreteNetwork net = load_network(kChainDoc);
  DiscreteNetwork again = load_network(save_network(net));
  REQUIRE(again.node_count() == net.node_count());
  for (int i = 0; i < net.node_count(); ++i) {
    CHECK(again.variable(i).name == net.variable(i).name);
    CHECK(again.parents(i) == net.parents(i));
    for (int r = 0; r < net.row_count(i); ++r)
      for (int s = 0; s < net.variable(i).arity(); ++s)
        CHECK(again.cpt(i)[r][s] == doctest::Approx(net.cpt(i)[r][s]).epsilon(1e-15));
  }
}

TEST_CASE("parameter_value") {
  DiscreteNetwork net = load_network(kChainDoc);
  CHECK(parameter_value(net, {"B", 0, {0}}) == 0.3);
  CHECK(parameter_value(net, {"A", 0, {}}) == 0.4);  // root: empty parent config
  CHECK_THROWS_AS(parameter_value(net, {"B", 5, {0}}), std::out_of_range);
  CHECK_THROWS_AS(parameter_value(net, {"B", 0, {}}), std::out_of_range);
}

TEST_CASE("apply_parameter examples") {
  DiscreteNetwork net = load_network(kChainDoc);

  SUBCASE("binary complement") {
    DiscreteNetwork out = apply_parameter(net, {"B", 0, {0}}, 0.6);
    CHECK(out.cpt(1)[0][0] == 0.6);
    CHECK(out.cpt(1)[0][1] == doctest::Approx(0.4).epsilon(1e-12));
  }

  SUBCASE("ternary row scales siblings by 0.5") {
    const std::string doc = R"({
      "variables": [{"name": "T", "states": ["t1", "t2", "t3"]}],
      "cpt": {"T": [[0.2, 0.3, 0.5]]}
    })";
    DiscreteNetwork t = load_network(doc);
    DiscreteNetwork out = apply_parameter(t, {"T", 0, {}}, 0.6);
    CHECK(out.cpt(0)[0][0] == 0.6);
    CHECK(out.cpt(0)[0][1] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(out.cpt(0)[0][2] == doctest::Approx(0.25).epsilon(1e-12));

    DiscreteNetwork same = apply_parameter(t, {"T", 0, {}}, 0.2);
    for (int s = 0; s < 3; ++s)
      CHECK(std::abs(same.cpt(0)[0][s] - t.cpt(0)[0][s]) <= 1e-15);
  }

  SUBCASE("degenerate row is reported") {
    const std::string doc = R"({
      "variables": [{"name": "T", "states": ["t1", "t2"]}],
      "cpt": {"T": [[1.0, 0.0]]}
    })";
    DiscreteNetwork t = load_network(doc);
    CHECK_THROWS_AS(apply_parameter(t, {"T", 0, {}}, 0.5), std::domain_error);
  }

  SUBCASE("x outside [0,1] rejected") {
    CHECK_THROWS_AS(apply_parameter(net, {"B", 0, {0}}, 1.5), std::invalid_argument);
  }
}

TEST_CASE("apply_parameter properties under random shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DiscreteNetwork net = random_network(rng);
    const int node = rng.uniform_int(0, net.node_count() - 1);
    const int row = rng.uniform_int(0, net.row_count(node) - 1);
    const int state = rng.uniform_int(0, net.variable(node).arity() - 1);
    ParameterRef pref{net.variable(node).name, state, net.row_config(node, row)};
    const double x = rng.uniform();

    DiscreteNetwork out = apply_parameter(net, pref, x);

    // round trip is exact
    CHECK(parameter_value(out, pref) == x);

    // modified row still sums to one
    double sum = 0.0;
    for (double e : out.cpt(node)[row]) sum += e;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // sibling proportions preserved
    const auto& before = net.cpt(node)[row];
    const auto& after = out.cpt(node)[row];
    for (int a = 0; a < net.variable(node).arity(); ++a)
      for (int b = a + 1; b < net.variable(node).arity(); ++b) {
        if (a == state || b == state) continue;
        CHECK(after[a] * before[b] == doctest::Approx(after[b] * before[a]).epsilon(1e-12));
      }

    // every other row is bit-identical
    for (int i = 0; i < net.node_count(); ++i)
      for (int r = 0; r < net.row_count(i); ++r) {
        if (i == node && r == row) continue;
        CHECK(out.cpt(i)[r] == net.cpt(i)[r]);
      }
  }
}

TEST_CASE("enumerate_profiles") {
  DiscreteNetwork net = load_network(kChainDoc);

  SUBCASE("two binary observables in documented order") {
    std::vector<std::string> obs{"A", "B"};
    auto result = enumerate_profiles(net, obs);
    REQUIRE(result.materialized);
    REQUIRE(result.count == 4);
    // first listed variable varies slowest
    std::vector<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int i = 0; i < 4; ++i) {
      CHECK(result.profiles[i].state_of("A") == expected[i].first);
      CHECK(result.profiles[i].state_of("B") == expected[i].second);
    }
  }

  SUBCASE("empty observable list yields one empty profile") {
    auto result = enumerate_profiles(net, std::vector<std::string>{});
    REQUIRE(result.materialized);
    REQUIRE(result.count == 1);
    CHECK(result.profiles[0].empty());
  }

  SUBCASE("25 ternary observables trip the cap with an exact count") {
    std::vector<Variable> vars;
    std::vector<std::vector<int>> parents(25);
    std::vector<std::vector<std::vector<double>>> cpts(25);
    std::vector<std::string> names;
    for (int i = 0; i < 25; ++i) {
      Variable v{"V" + std::to_string(i), {"s1", "s2", "s3"}};
      vars.push_back(v);
      names.push_back(v.name);
      cpts[i] = {{0.2, 0.3, 0.5}};
    }
    DiscreteNetwork wide(vars, parents, cpts);
    auto result = enumerate_profiles(wide, names);
    CHECK_FALSE(result.materialized);
    CHECK(result.count == 847288609443ULL);  // 3^25
  }

  SUBCASE("duplicate observables rejected") {
    std::vector<std::string> obs{"A", "A"};
    CHECK_THROWS_AS(enumerate_profiles(net, obs), std::invalid_argument);
  }
}

TEST_CASE("profile counts and distinctness") {
  Rng rng(3);
  DiscreteNetwork net = random_network(rng);
  std::vector<std::string> obs;
  for (int i = 0; i + 1 < net.node_count(); ++i) obs.push_back(net.variable(i).name);
  auto result = enumerate_profiles(net, obs);
  REQUIRE(result.materialized);
  std::uint64_t expected = 1;
  for (const auto& name : obs) expected *= net.variable(net.require_index(name)).arity();
  CHECK(result.count == expected);
  CHECK(result.profiles.size() == expected);
  for (std::size_t i = 0; i < result.profiles.size(); ++i)
    for (std::size_t j = i + 1; j < result.profiles.size(); ++j) {
      bool same = true;
      for (const auto& [name, state] : result.profiles[i].observations())
        if (result.profiles[j].state_of(name) != state) same = false;
      CHECK_FALSE(same);
    }
}

TEST_CASE("evidence profiles reject duplicates and unknown names") {
  DiscreteNetwork net = load_network(kChainDoc);
  EvidenceProfile e;
  e.observe("A", 0);
  CHECK_THROWS_AS(e.observe("A", 1), std::invalid_argument);
  EvidenceProfile bad;
  bad.observe("Z", 0);
  CHECK_THROWS_AS(validate_evidence(net, bad), std::out_of_range);
  EvidenceProfile range;
  range.observe("A", 7);
  CHECK_THROWS_AS(validate_evidence(net, range), std::out_of_range);
}

}  // TEST_SUITE
