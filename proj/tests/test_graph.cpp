#include "dircount/graph.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "dircount/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dircount;

namespace {

std::string fixture(const std::string& name) {
  return std::string(DIRCOUNT_FIXTURE_DIR) + "/" + name;
}

const std::vector<std::string> kAllFixtures = {
    "fibonacci.json",   "fibonacci_labelled.json", "full_shift_2.json",
    "full_shift_3.json", "full_shift_4.json",      "cycle3.json",
    "single_loop.json", "bipartite.json",          "twostate_labelled.json"};

}  // namespace

TEST_CASE("parsing the plain two-vertex fixture") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 3);
  CHECK(!g.labelled());
  CHECK(g.vertex_names[0] == "q1");
  CHECK(g.vertex_names[1] == "q2");
  CHECK(g.edge_names == std::vector<std::string>{"a1", "a2", "a3"});
  CHECK(g.source == std::vector<int>{0, 0, 1});
  CHECK(g.goal == std::vector<int>{0, 1, 0});
  CHECK(g.out_edges[0] == std::vector<int>{0, 1});
  CHECK(g.out_edges[1] == std::vector<int>{2});
  CHECK(g.vertex_id("q2") == 1);
  CHECK(g.vertex_id("nope") == -1);
}

TEST_CASE("parsing the labelled fixture") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci_labelled.json"));
  CHECK(g.labelled());
  CHECK(g.label_names == std::vector<std::string>{"b1", "b2"});
  CHECK(g.label == std::vector<int>{0, 1, 0});
}

TEST_CASE("parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_graph("not json"), GraphError);
  CHECK_THROWS_AS(parse_graph("[]"), GraphError);
  CHECK_THROWS_AS(parse_graph(R"({"vertices":["q"]})"), GraphError);
  CHECK_THROWS_AS(parse_graph(R"({"edges":[]})"), GraphError);
  CHECK_THROWS_AS(parse_graph(R"({"vertices":["q"],"edges":[]})"),
                  GraphError);
  CHECK_THROWS_AS(parse_graph(R"({"vertices":[],"edges":[]})"), GraphError);
  CHECK_THROWS_AS(
      parse_graph(
          R"({"vertices":["q"],"edges":[{"id":"a","from":"q","to":"zz"}]})"),
      GraphError);
  CHECK_THROWS_AS(
      parse_graph(R"({"vertices":["q","q"],
                      "edges":[{"id":"a","from":"q","to":"q"}]})"),
      GraphError);
  CHECK_THROWS_AS(
      parse_graph(R"({"vertices":["q"],
                      "edges":[{"id":"a","from":"q","to":"q"},
                               {"id":"a","from":"q","to":"q"}]})"),
      GraphError);
  // Labels must be on all edges or on none.
  CHECK_THROWS_AS(
      parse_graph(R"({"vertices":["q"],
                      "edges":[{"id":"a","from":"q","to":"q","label":"b"},
                               {"id":"c","from":"q","to":"q"}]})"),
      GraphError);
  // Two edges leaving the same vertex with the same label.
  CHECK_THROWS_AS(
      parse_graph(R"({"vertices":["q","r"],
                      "edges":[{"id":"a","from":"q","to":"q","label":"b"},
                               {"id":"c","from":"q","to":"r","label":"b"},
                               {"id":"d","from":"r","to":"q","label":"b"}]})"),
      GraphError);
}

TEST_CASE("parser accepts parallel unlabelled edges") {
  DirectedGraph g = parse_graph_file(fixture("full_shift_2.json"));
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("connectivity check and diagnostic") {
  for (const auto& name : kAllFixtures) {
    CAPTURE(name);
    CHECK(is_connected(parse_graph_file(fixture(name))));
  }
  DirectedGraph bad = parse_graph(
      R"({"vertices":["q1","q2"],
          "edges":[{"id":"a1","from":"q1","to":"q2"},
                   {"id":"a2","from":"q2","to":"q2"}]})");
  CHECK(!is_connected(bad));
  auto pair = unreachable_pair(bad);
  REQUIRE(pair.has_value());
  CHECK(pair->first == 1);
  CHECK(pair->second == 0);
  CHECK_THROWS_WITH_AS(require_connected(bad),
                       "graph is not strongly connected: no path from 'q2' "
                       "to 'q1'",
                       GraphError);
}

TEST_CASE("period and phases") {
  SUBCASE("aperiodic two-vertex graph") {
    PeriodData pd = compute_period(parse_graph_file(fixture("fibonacci.json")));
    CHECK(pd.p == 1);
    CHECK(pd.phase == std::vector<int>{0, 0});
  }
  SUBCASE("pure cycle") {
    PeriodData pd = compute_period(parse_graph_file(fixture("cycle3.json")));
    CHECK(pd.p == 3);
    CHECK(pd.phase == std::vector<int>{0, 1, 2});
  }
  SUBCASE("two-phase graph") {
    DirectedGraph g = parse_graph_file(fixture("bipartite.json"));
    PeriodData pd = compute_period(g);
    CHECK(pd.p == 2);
    CHECK(pd.phase[g.vertex_id("u1")] == 0);
    CHECK(pd.phase[g.vertex_id("u2")] == 0);
    CHECK(pd.phase[g.vertex_id("v")] == 1);
    // Every edge advances the phase by exactly one.
    for (int a = 0; a < g.edge_count(); ++a)
      CHECK(pd.phase[g.goal[a]] == (pd.phase[g.source[a]] + 1) % pd.p);
  }
  SUBCASE("single vertex with loops") {
    CHECK(compute_period(parse_graph_file(fixture("full_shift_2.json"))).p ==
          1);
    CHECK(compute_period(parse_graph_file(fixture("single_loop.json"))).p ==
          1);
  }
}

TEST_CASE("cyclic graph detection") {
  CHECK(is_cyclic(parse_graph_file(fixture("cycle3.json"))));
  CHECK(is_cyclic(parse_graph_file(fixture("single_loop.json"))));
  CHECK(!is_cyclic(parse_graph_file(fixture("fibonacci.json"))));
  CHECK(!is_cyclic(parse_graph_file(fixture("full_shift_2.json"))));
}

TEST_CASE("reach table gives exact minimum lengths per residue") {
  DirectedGraph g = parse_graph_file(fixture("bipartite.json"));
  PeriodData pd = compute_period(g);
  ReachTable t = build_reach_table(g, pd);
  int u1 = g.vertex_id("u1"), v = g.vertex_id("v");
  CHECK(t.min_length_mod(u1, u1, 0) == 0);
  CHECK(t.min_length_mod(u1, u1, 1) == -1);
  CHECK(t.min_length_mod(u1, v, 1) == 1);
  CHECK(t.min_length_mod(u1, v, 0) == -1);
  CHECK(t.min_length_mod(v, u1, 1) == 1);
  CHECK(t.may_reach(u1, u1, 2));
  CHECK(!t.may_reach(u1, u1, 3));
  CHECK(!t.may_reach(u1, v, 4));
  CHECK(t.may_reach(u1, v, 5));
}

TEST_CASE("path enumeration basics") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  SUBCASE("length zero yields the empty word only on the diagonal") {
    CHECK(enumerate_paths(g, 0, 0, 0) == std::vector<Word>{{}});
    CHECK(enumerate_paths(g, 0, 1, 1) == std::vector<Word>{{}});
    CHECK(enumerate_paths(g, 0, 0, 1).empty());
  }
  SUBCASE("length one lists single edges") {
    CHECK(enumerate_paths(g, 1, 0, 0) == std::vector<Word>{{0}});
    CHECK(enumerate_paths(g, 1, 0, 1) == std::vector<Word>{{1}});
    CHECK(enumerate_paths(g, 1, 1, 0) == std::vector<Word>{{2}});
    CHECK(enumerate_paths(g, 1, 1, 1).empty());
  }
  SUBCASE("words come out in strict lexicographic order") {
    std::vector<Word> words = enumerate_paths(g, 9, 0, 0);
    CHECK(std::is_sorted(words.begin(), words.end()));
    CHECK(std::adjacent_find(words.begin(), words.end()) == words.end());
    for (const Word& w : words) {
      REQUIRE(w.size() == 9);
      CHECK(g.source[w.front()] == 0);
      CHECK(g.goal[w.back()] == 0);
      for (size_t k = 1; k < w.size(); ++k)
        CHECK(g.source[w[k]] == g.goal[w[k - 1]]);
    }
  }
  SUBCASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(enumerate_paths(g, -1, 0, 0), UsageError);
    CHECK_THROWS_AS(enumerate_paths(g, 3, 0, 7), GraphError);
  }
}

TEST_CASE("enumeration totals match big-integer matrix powers") {
  for (const auto& name : kAllFixtures) {
    CAPTURE(name);
    DirectedGraph g = parse_graph_file(fixture(name));
    for (int n = 0; n <= 6; ++n) {
      for (int q = 0; q < g.vertex_count(); ++q) {
        for (int q_prime = 0; q_prime < g.vertex_count(); ++q_prime) {
          mpz_class expected = oracle::adjacency_power_count(g, n, q, q_prime);
          CHECK(mpz_class(enumerate_paths(g, n, q, q_prime).size()) ==
                expected);
        }
      }
    }
  }
}

TEST_CASE("threaded enumeration reproduces the sequential order") {
  for (const auto& name : {"fibonacci.json", "full_shift_2.json",
                           "bipartite.json", "twostate_labelled.json"}) {
    CAPTURE(name);
    DirectedGraph g = parse_graph_file(fixture(name));
    for (int q = 0; q < g.vertex_count(); ++q) {
      for (int q_prime = 0; q_prime < g.vertex_count(); ++q_prime) {
        CHECK(enumerate_paths(g, 8, q, q_prime, 4) ==
              enumerate_paths(g, 8, q, q_prime, 1));
      }
    }
  }
}

TEST_CASE("occurrence vectors") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci.json"));
  CHECK(occurrence({0, 0, 1, 2}, g) == std::vector<long long>{2, 1, 1});
  CHECK(occurrence({}, g) == std::vector<long long>{0, 0, 0});
  CHECK_THROWS_AS(occurrence({1, 0}, g), GraphError);  // a2 then a1: breaks
  CHECK_THROWS_AS(occurrence({5}, g), GraphError);
  SUBCASE("every enumerated word's occurrence sums to its length") {
    for (const Word& w : enumerate_paths(g, 7, 0, 1)) {
      auto counts = occurrence(w, g);
      long long total = 0;
      for (long long c : counts) total += c;
      CHECK(total == 7);
    }
  }
}

TEST_CASE("label projection") {
  DirectedGraph g = parse_graph_file(fixture("fibonacci_labelled.json"));
  CHECK(project_word({0, 1, 2}, g) == std::vector<int>{0, 1, 0});
  CHECK(project_word({}, g) == std::vector<int>{});
  CHECK_THROWS_AS(project_word({1, 0}, g), GraphError);
  DirectedGraph plain = parse_graph_file(fixture("fibonacci.json"));
  CHECK_THROWS_AS(project_word({0}, plain), GraphError);
}
