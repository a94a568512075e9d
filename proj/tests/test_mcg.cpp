// Memory constraint graphs: adjacency weights, bursts and port tokens.

#include <set>
#include <sstream>
#include <string>

#include <catch_amalgamated.hpp>

#include "memhls/benchmarks.hpp"
#include "memhls/mcg.hpp"
#include "memhls/memory_map.hpp"

using namespace memhls;

namespace {

MemoryTable one_bank(std::initializer_list<std::pair<const char*, int>> data) {
  MemoryTable t;
  for (const auto& [name, addr] : data) {
    MappingEntry e;
    e.name = name;
    e.bank = 0;
    e.address = addr;
    t.entries.push_back(e);
  }
  return t;
}

}  // namespace

TEST_CASE("ageing vector at consecutive addresses chains W_seq edges", "[mcg]") {
  const auto mcg = build_mcg(one_bank({{"x(0)", 9}, {"x(1)", 10}, {"x(2)", 11}, {"x(3)", 12}}), 0);
  REQUIRE(mcg.size() == 4);
  CHECK(mcg.edge_count() == 12);
  CHECK(mcg.weight("x(0)", "x(1)") == AccessWeight::Seq);
  CHECK(mcg.weight("x(1)", "x(2)") == AccessWeight::Seq);
  CHECK(mcg.weight("x(2)", "x(3)") == AccessWeight::Seq);
  CHECK(mcg.weight("x(1)", "x(0)") == AccessWeight::Rand);
  CHECK(mcg.weight("x(0)", "x(2)") == AccessWeight::Rand);
  CHECK(mcg.weight("x(3)", "x(0)") == AccessWeight::Rand);
  int seq = 0;
  for (const auto& a : mcg.nodes())
    for (const auto& b : mcg.nodes())
      if (a.name != b.name) seq += mcg.weight(a.name, b.name) == AccessWeight::Seq;
  CHECK(seq == 3);
}

TEST_CASE("single-datum bank has no edges", "[mcg]") {
  const auto mcg = build_mcg(one_bank({{"a", 0}}), 0);
  CHECK(mcg.size() == 1);
  CHECK(mcg.edge_count() == 0);
  CHECK(build_mcg(MemoryTable{}, 0).edge_count() == 0);
}

TEST_CASE("non-consecutive addresses give only W_rand edges", "[mcg]") {
  const auto mcg = build_mcg(one_bank({{"a", 0}, {"b", 2}, {"c", 4}}), 0);
  for (const auto& a : mcg.nodes())
    for (const auto& b : mcg.nodes())
      if (a.name != b.name) CHECK(mcg.weight(a.name, b.name) == AccessWeight::Rand);
}

TEST_CASE("build_all_mcgs partitions memory-resident data by bank", "[mcg]") {
  const auto g = gen_lms(8);
  const auto t = place_arrays(extract_table(g), {{"h", 0}, {"x", 1}}, 2);
  const auto mcgs = build_all_mcgs(t);
  REQUIRE(mcgs.size() == 2);
  CHECK(mcgs[0].size() == 8);
  CHECK(mcgs[1].size() == 8);
  CHECK(mcgs[0].contains("h(7)"));
  CHECK(!mcgs[0].contains("x(0)"));
  CHECK(!mcgs[0].contains("adapt"));  // register
  CHECK_THROWS_AS(mcgs[0].address_of("x(0)"), Error);
}

TEST_CASE("access_weight: first access is random, then adjacency decides", "[mcg]") {
  const auto mcg = build_mcg(one_bank({{"a", 5}, {"b", 6}, {"c", 9}}), 0);
  CHECK(access_weight(mcg, std::nullopt, "a") == AccessWeight::Rand);
  CHECK(access_weight(mcg, std::string_view("a"), "b") == AccessWeight::Seq);
  CHECK(access_weight(mcg, std::string_view("b"), "c") == AccessWeight::Rand);
  CHECK(access_weight(mcg, std::string_view("b"), "a") == AccessWeight::Rand);
  TimingConfig cfg;
  cfg.w_seq = 1;
  cfg.w_rand = 3;
  CHECK(access_cost(AccessWeight::Seq, cfg) == 1);
  CHECK(access_cost(AccessWeight::Rand, cfg) == 3);
}

TEST_CASE("port tokens: one access per port at a time", "[mcg][ports]") {
  TimingConfig cfg;
  cfg.w_seq = 1;
  cfg.w_rand = 2;
  PortState ps(1);
  CHECK(ps.token_count() == 1);
  CHECK(port_accessible(ps, 0));
  const auto g0 = begin_access(ps, 0, 5, 0, cfg);
  CHECK(g0.weight == AccessWeight::Rand);
  CHECK(g0.finish == 2);
  CHECK(!port_accessible(ps, 1));
  CHECK_THROWS_AS(begin_access(ps, 0, 6, 1, cfg), Error);
  CHECK(port_accessible(ps, 2));
  const auto g1 = begin_access(ps, 0, 6, 2, cfg);
  CHECK(g1.weight == AccessWeight::Seq);
  CHECK(g1.finish == 3);
  const auto g2 = begin_access(ps, 0, 9, 3, cfg);
  CHECK(g2.weight == AccessWeight::Rand);
  CHECK(g2.finish == 5);
}

TEST_CASE("dual-port bank keeps two tokens and prefers the sequential port", "[mcg][ports]") {
  TimingConfig cfg;
  PortState ps(2);
  CHECK(ps.token_count() == 2);
  (void)begin_access(ps, 0, 10, 0, cfg);
  CHECK(port_accessible(ps, 0));  // port 1 still idle
  (void)begin_access(ps, 1, 20, 0, cfg);
  CHECK(!port_accessible(ps, 1));
  CHECK(port_accessible(ps, 2));
  CHECK(ps.idle_port(2, 21) == std::optional<std::size_t>(1));
  CHECK(ps.idle_port(2, 11) == std::optional<std::size_t>(0));
  CHECK(ps.idle_port(2, 40) == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(begin_access(ps, 2, 0, 0, cfg), Error);
}

TEST_CASE("fastest_sequence picks the longest consecutive run", "[mcg][burst]") {
  const auto mcg = build_mcg(one_bank({{"a", 5}, {"b", 6}, {"c", 9}, {"d", 10}, {"e", 11}}), 0);
  CHECK(fastest_sequence(mcg, {"a", "b", "c", "d", "e"}) == std::vector<std::string>{"c", "d", "e"});
  CHECK(fastest_sequence(mcg, {"a", "b", "c", "e"}) == std::vector<std::string>{"a", "b"});
  CHECK(fastest_sequence(mcg, {"a", "c", "e"}) == std::vector<std::string>{"a"});
  CHECK(fastest_sequence(mcg, {"e"}) == std::vector<std::string>{"e"});
  CHECK(fastest_sequence(mcg, {}).empty());
}

TEST_CASE("fastest_sequence on an ageing vector returns the whole vector", "[mcg][burst]") {
  const auto t = extract_table(gen_fir(16));
  const auto mcg = build_mcg(t, 0);
  std::set<std::string> xs;
  for (int i = 0; i < 16; ++i) xs.insert("x(" + std::to_string(i) + ")");
  const auto run = fastest_sequence(mcg, xs);
  REQUIRE(run.size() == 16);
  for (std::size_t i = 1; i < run.size(); ++i) CHECK(mcg.weight(run[i - 1], run[i]) == AccessWeight::Seq);
}

TEST_CASE("dot dump lists sequential edges", "[mcg]") {
  const auto mcg = build_mcg(one_bank({{"x(0)", 9}, {"x(1)", 10}, {"y", 20}}), 0);
  std::ostringstream os;
  write_mcg_dot(os, mcg);
  const auto s = os.str();
  CHECK(s.find("digraph mcg_bank0") != std::string::npos);
  CHECK(s.find("\"x(0)\" -> \"x(1)\" [style=dotted") != std::string::npos);
  CHECK(s.find("\"x(1)\" -> \"y\" [color=gray]") != std::string::npos);
}
