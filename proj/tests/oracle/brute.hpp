#pragma once

// Deliberately naive reference computations used as test oracles. None of
// them shares code with the library algorithms they check.

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "memhls/memory_map.hpp"
#include "memhls/schedule.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace oracle {

// Earliest start of every vertex: the maximum, over every precedence path
// ending at the vertex, of the latencies along it. Paths are enumerated one
// by one (exponential; fine for small graphs).
inline std::vector<int> longest_path_starts(const memhls::Sfg& g, const memhls::TimingConfig& cfg) {
  std::vector<int> best(g.size(), 0);
  std::function<void(std::size_t, int)> walk = [&](std::size_t v, int at) {
    best[v] = std::max(best[v], at);
    if (g.vertex(v).kind == memhls::VertexKind::Delay) return;  // z^-1 feeds the next iteration
    for (auto s : g.succs(v)) walk(s, at + cfg.latency_of(g.vertex(v).kind));
  };
  for (std::size_t v = 0; v < g.size(); ++v) {
    bool root = true;
    for (auto p : g.preds(v))
      if (g.vertex(p).kind != memhls::VertexKind::Delay) root = false;
    if (root) walk(v, 0);
  }
  return best;
}

inline int longest_path_length(const memhls::Sfg& g, const memhls::TimingConfig& cfg) {
  const auto s = longest_path_starts(g, cfg);
  int out = 0;
  for (std::size_t v = 0; v < g.size(); ++v) out = std::max(out, s[v] + cfg.latency_of(g.vertex(v).kind));
  return out;
}

// Maximum number of half-open [birth, death) intervals covering one cycle,
// found by testing every cycle.
inline int max_overlap_by_cycle(const std::vector<std::pair<int, int>>& iv) {
  int lo = 0, hi = 0;
  for (auto [b, d] : iv) {
    lo = std::min(lo, b);
    hi = std::max(hi, d);
  }
  int best = 0;
  for (int t = lo; t < hi; ++t) {
    int n = 0;
    for (auto [b, d] : iv)
      if (b <= t && t < d) ++n;
    best = std::max(best, n);
  }
  return best;
}

// Token conservation checked cycle by cycle: per bank, in-flight accesses
// never exceed the port count; per port, at most one access; per operator
// class, in-flight operations never exceed the unit count. Returns the first
// violation found, or an empty string.
inline std::string token_violation(const memhls::Schedule& s, const memhls::MemoryTable& t,
                                   const memhls::ResourceSet& r) {
  int end = 0;
  for (const auto& a : s.accesses) end = std::max(end, a.finish());
  for (const auto& o : s.operations) end = std::max(end, o.finish());
  for (int cyc = 0; cyc < end; ++cyc) {
    std::map<int, int> per_bank;
    std::map<std::pair<int, int>, int> per_port;
    for (const auto& a : s.accesses)
      if (a.start <= cyc && cyc < a.finish()) {
        ++per_bank[a.bank];
        ++per_port[{a.bank, a.port}];
      }
    for (auto [b, n] : per_bank)
      if (n > t.ports_per_bank)
        return "bank " + std::to_string(b) + " has " + std::to_string(n) + " accesses at cycle " + std::to_string(cyc);
    for (auto [p, n] : per_port)
      if (n > 1) return "port used twice at cycle " + std::to_string(cyc);
    int ops[2] = {0, 0};
    for (const auto& o : s.operations)
      if (o.start <= cyc && cyc < o.finish()) ++ops[o.resource == memhls::ResourceClass::Mul ? 0 : 1];
    if (ops[0] > r.mul || ops[1] > r.alu) return "operator overflow at cycle " + std::to_string(cyc);
  }
  return {};
}

}  // namespace oracle
