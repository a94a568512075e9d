// Independent checker: accepts scheduler output and catches each kind of
// hand-made violation.

#include <algorithm>
#include <string>

#include <catch_amalgamated.hpp>

#include "memhls/benchmarks.hpp"
#include "memhls/explorer.hpp"
#include "memhls/scheduler.hpp"
#include "memhls/sfg_text.hpp"
#include "memhls/verify.hpp"

using namespace memhls;

namespace {

struct Fixture {
  Sfg g = gen_fir(4);
  MemoryTable table = reference_mapping(Benchmark::Fir, g, 2);
  TimingConfig cfg = [] {
    auto c = benchmark_timing(Benchmark::Fir);
    c.cadence = 40;
    return c;
  }();
  ResourceSet resources{1, 1};
  Schedule s = schedule(g, table, resources, cfg);

  std::vector<Diagnostic> check(const Schedule& x) const { return verify_schedule(x, g, table, resources, cfg); }
};

OperationRecord& op_named(Schedule& s, const Sfg& g, const std::string& id) {
  for (auto& op : s.operations)
    if (g.vertex(op.vertex).id == id) return op;
  throw std::runtime_error("no op " + id);
}

}  // namespace

TEST_CASE("scheduler output verifies", "[verify]") {
  Fixture f;
  CHECK(f.check(f.s).empty());
}

TEST_CASE("two same-cycle accesses on a single-port bank overflow it", "[verify]") {
  Fixture f;
  auto s = f.s;
  // Move the second bank-1 read onto the first one's cycle.
  AccessRecord* first = nullptr;
  for (auto& a : s.accesses)
    if (a.bank == 1) {
      if (!first) {
        first = &a;
      } else {
        a.start = first->start;
        break;
      }
    }
  const auto d = f.check(s);
  CHECK(has_code(d, "port-overflow"));
}

TEST_CASE("one broken dependence gives exactly one diagnostic", "[verify]") {
  // Two-operation chain with register operands: only the edge is at stake.
  const auto g = parse_sfg("node i input\nnode m mul\nnode s add\nnode y output\nedge i m\nedge i s\nedge m s\nedge s y\n");
  TimingConfig cfg;
  cfg.cadence = 20;
  const auto s0 = schedule(g, MemoryTable{}, {1, 1}, cfg);
  REQUIRE(verify_schedule(s0, g, MemoryTable{}, {1, 1}, cfg).empty());
  auto s = s0;
  op_named(s, g, "s").start = 0;  // before m finishes
  s.latency = 0;                   // keep the reported latency consistent
  for (const auto& op : s.operations) s.latency = std::max(s.latency, op.finish());
  const auto d = verify_schedule(s, g, MemoryTable{}, {1, 1}, cfg);
  REQUIRE(d.size() == 1);
  CHECK(d[0].code == "dependence");
  CHECK(d[0].subject == "m->s");
}

TEST_CASE("a mutated FIR schedule reports the dependence", "[verify]") {
  Fixture f;
  auto s = f.s;
  auto& acc = op_named(s, f.g, "acc_1");
  acc.start -= 1;
  CHECK(has_code(f.check(s), "dependence"));
}

TEST_CASE("operator overuse is caught", "[verify]") {
  Fixture f;
  auto s = f.s;
  // Start two multiplies together on the single multiplier.
  auto& m0 = op_named(s, f.g, "mul_0");
  auto& m1 = op_named(s, f.g, "mul_1");
  m1.start = m0.start;
  const auto d = f.check(s);
  CHECK(has_code(d, "operator-overflow"));
  CHECK(has_code(d, "instance-overlap"));
}

TEST_CASE("missing and extra records are caught", "[verify]") {
  Fixture f;
  auto s = f.s;
  s.accesses.pop_back();
  CHECK(has_code(f.check(s), "missing-access"));
  s = f.s;
  s.accesses.push_back(s.accesses.front());
  CHECK(!f.check(s).empty());
  s = f.s;
  s.operations.pop_back();
  CHECK(has_code(f.check(s), "missing-op"));
  s = f.s;
  s.operations.front().duration += 1;
  CHECK(has_code(f.check(s), "op-duration"));
}

TEST_CASE("wrong placement, port and weight class are caught", "[verify]") {
  Fixture f;
  auto s = f.s;
  s.accesses.front().address += 7;
  CHECK(has_code(f.check(s), "access-address"));
  s = f.s;
  s.accesses.front().port = 1;
  CHECK(has_code(f.check(s), "port-range"));
  s = f.s;
  AccessRecord* seq = nullptr;
  for (auto& a : s.accesses)
    if (a.weight == AccessWeight::Seq) seq = &a;
  REQUIRE(seq);
  seq->weight = AccessWeight::Rand;
  seq->duration = f.cfg.w_rand;
  CHECK(!f.check(s).empty());
}

TEST_CASE("write-after-read on a loopback is enforced", "[verify]") {
  const auto g = gen_lms(4);
  const auto t = reference_mapping(Benchmark::Lms, g, 2);
  auto cfg = benchmark_timing(Benchmark::Lms);
  cfg.cadence = 60;
  const auto s0 = schedule(g, t, {2, 2}, cfg);
  REQUIRE(verify_schedule(s0, g, t, {2, 2}, cfg).empty());
  auto s = s0;
  // Pull the h(0) update write ahead of the read of the old coefficient.
  const AccessRecord* rd = nullptr;
  for (const auto& a : s.accesses)
    if (a.datum == "h(0)" && a.direction == AccessDirection::Read && (!rd || a.start < rd->start)) rd = &a;
  REQUIRE(rd);
  const int read_start = rd->start;
  for (auto& a : s.accesses)
    if (a.datum == "h(0)" && a.direction == AccessDirection::Write) a.start = read_start;
  CHECK(!verify_schedule(s, g, t, {2, 2}, cfg).empty());
}

TEST_CASE("peak_overlap counts half-open intervals", "[verify]") {
  CHECK(detail::peak_overlap({}) == 0);
  CHECK(detail::peak_overlap({{0, 2}, {2, 4}}) == 1);
  CHECK(detail::peak_overlap({{0, 3}, {1, 2}, {1, 4}}) == 3);
  CHECK(detail::peak_overlap({{5, 5}}) == 0);
}
