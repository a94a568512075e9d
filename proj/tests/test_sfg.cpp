// SFG text format, validation and round-trips.

#include <set>
#include <string>

#include <catch_amalgamated.hpp>

#include "memhls/benchmarks.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/sfg.hpp"
#include "memhls/sfg_text.hpp"

using namespace memhls;

namespace {

std::set<std::pair<std::string, std::string>> edge_ids(const Sfg& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : g.edges()) out.emplace(g.vertex(e.src).id, g.vertex(e.dst).id);
  return out;
}

template <class Fn>
ParseError parse_error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a ParseError");
  return ParseError("unreachable");
}

}  // namespace

TEST_CASE("minimal chain gets a synthesized source and sink", "[sfg][parse]") {
  const auto g = parse_sfg("node a input\nnode m mul\nnode y output\nedge a m\nedge m y\n");
  REQUIRE(g.size() == 5);
  REQUIRE(g.source());
  REQUIRE(g.sink());
  CHECK(g.terminals_synthesized());
  CHECK(g.vertex(*g.source()).kind == VertexKind::Source);
  CHECK(g.succs(*g.source()).size() == 1);
  CHECK(g.vertex(g.succs(*g.source()).front()).id == "a");
  CHECK(g.preds(*g.sink()).size() == 1);
  CHECK(g.vertex(g.preds(*g.sink()).front()).id == "y");
  CHECK(validate_sfg(g).empty());
}

TEST_CASE("LMS-4 listing has the memory-table data names", "[sfg][parse]") {
  const auto g = parse_sfg(emit_sfg(gen_lms(4)));
  std::set<std::string> labels;
  for (const auto& v : g.vertices())
    if (v.kind == VertexKind::Data || v.kind == VertexKind::Constant) labels.insert(v.label);
  for (const auto& v : g.vertices())
    if (v.kind == VertexKind::Delay && v.label.rfind("x(", 0) == 0) labels.insert(v.label);
  const std::set<std::string> expected{"adapt", "deux_mu", "h(0)", "h(1)", "h(2)", "h(3)",
                                       "x(0)",  "x(1)",    "x(2)", "x(3)"};
  CHECK(labels == expected);
}

TEST_CASE("a cycle not broken by a delay is rejected", "[sfg][parse]") {
  const char* text = "node i input\nnode m add\nnode a add\nnode y output\n"
                     "edge i m\nedge m a\nedge a m\nedge a y\n";
  try {
    (void)parse_sfg(text);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(has_code(e.diagnostics(), "cycle"));
  }
}

TEST_CASE("the same cycle through a delay is accepted", "[sfg][parse]") {
  const char* text = "node i input\nnode a add\nnode z delay label=acc\nnode y output\n"
                     "edge i a\nedge z a\nedge a z\nedge a y\n";
  const auto g = parse_sfg(text);
  CHECK(validate_sfg(g).empty());
  CHECK(precedence_order(g).has_value());
}

TEST_CASE("syntax errors carry line and column", "[sfg][parse]") {
  auto e = parse_error_of([] { (void)parse_sfg("node a input\nnode b frobnicate\n"); });
  CHECK(e.line() == 2);
  CHECK(e.column() == 8);

  e = parse_error_of([] { (void)parse_sfg("node a input\n  bogus a b\n"); });
  CHECK(e.line() == 2);
  CHECK(e.column() == 3);

  e = parse_error_of([] { (void)parse_sfg("node a$ input\n"); });
  CHECK(e.line() == 1);
  CHECK(e.column() == 7);

  e = parse_error_of([] { (void)parse_sfg("node d data label=\n"); });
  CHECK(e.line() == 1);
}

TEST_CASE("duplicate ids, dangling endpoints and two sources are parse errors", "[sfg][parse]") {
  auto e = parse_error_of([] { (void)parse_sfg("node a input\nnode a output\n"); });
  CHECK(e.line() == 2);
  CHECK(std::string(e.what()).find("duplicate id") != std::string::npos);

  e = parse_error_of([] { (void)parse_sfg("node a input\nnode y output\nedge a q\n"); });
  CHECK(e.line() == 3);
  CHECK(e.column() == 8);
  CHECK(std::string(e.what()).find("dangling") != std::string::npos);

  e = parse_error_of([] { (void)parse_sfg("node s1 source\nnode s2 source\n"); });
  CHECK(std::string(e.what()).find("polarity") != std::string::npos);
}

TEST_CASE("comments and blank lines are ignored", "[sfg][parse]") {
  const auto g = parse_sfg("# header\n\nnode a input   # trailing\nnode m mul\n\nnode y output\nedge a m\nedge m y\n");
  CHECK(g.size() == 5);
}

TEST_CASE("validate_sfg on well-formed and broken graphs", "[sfg][validate]") {
  CHECK(validate_sfg(gen_fir(16)).empty());

  SECTION("two sources") {
    Sfg g;
    const auto s1 = g.add_vertex("s1", VertexKind::Source);
    const auto s2 = g.add_vertex("s2", VertexKind::Source);
    const auto a = g.add_vertex("a", VertexKind::Input);
    const auto y = g.add_vertex("y", VertexKind::Output);
    const auto t = g.add_vertex("t", VertexKind::Sink);
    g.add_edge(s1, a);
    g.add_edge(s2, a);
    g.add_edge(a, y);
    g.add_edge(y, t);
    CHECK(has_code(validate_sfg(g), "polarity"));
  }
  SECTION("delay with two predecessors") {
    Sfg g;
    const auto a = g.add_vertex("a", VertexKind::Data);
    const auto b = g.add_vertex("b", VertexKind::Data);
    const auto z = g.add_vertex("z", VertexKind::Delay);
    const auto m = g.add_vertex("m", VertexKind::Add);
    const auto y = g.add_vertex("y", VertexKind::Output);
    g.add_edge(a, z);
    g.add_edge(b, z);
    g.add_edge(z, m);
    g.add_edge(a, m);
    g.add_edge(m, y);
    g.close_polar();
    const auto d = validate_sfg(g);
    CHECK(has_code(d, "delay-arity"));
    CHECK(d.size() == 1);
  }
  SECTION("arithmetic vertex without consumer") {
    Sfg g;
    const auto a = g.add_vertex("a", VertexKind::Input);
    const auto m = g.add_vertex("m", VertexKind::Mul);
    g.add_edge(a, m);
    g.close_polar();
    CHECK(has_code(validate_sfg(g), "arity"));
  }
  SECTION("vertex off every source-to-sink path") {
    Sfg g;
    const auto a = g.add_vertex("a", VertexKind::Input);
    const auto y = g.add_vertex("y", VertexKind::Output);
    const auto p = g.add_vertex("p", VertexKind::Add);
    const auto q = g.add_vertex("q", VertexKind::Add);
    g.add_edge(a, y);
    g.add_edge(p, q);
    g.add_edge(q, p);  // closed loop, never reached
    g.close_polar();
    const auto d = validate_sfg(g);
    CHECK(has_code(d, "unreachable"));
  }
}

TEST_CASE("emit/parse round-trip is the identity on every benchmark", "[sfg][roundtrip]") {
  for (const auto& g : {gen_fir(1), gen_fir(16), gen_fir(16, AdderShape::Tree), gen_lms(1), gen_lms(8), gen_fft(2),
                        gen_fft(16)}) {
    const auto text = emit_sfg(g);
    const auto back = parse_sfg(text);
    CHECK(back.size() == g.size());
    CHECK(back.edges().size() == g.edges().size());
    CHECK(edge_ids(back) == edge_ids(g));
    for (std::size_t v = 0; v < g.size(); ++v) {
      auto w = back.find(g.vertex(v).id);
      REQUIRE(w);
      CHECK(back.vertex(*w).kind == g.vertex(v).kind);
      CHECK(back.vertex(*w).label == g.vertex(v).label);
    }
    CHECK(emit_sfg(back) == text);
  }
}
