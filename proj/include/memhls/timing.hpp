#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/sfg.hpp"

namespace memhls {

// Operator latencies in cycles. `alu` is the fallback for add/sub when they
// are not set individually.
struct KindLatencies {
  int add = 1;
  int sub = 1;
  int mul = 2;
  int alu = 1;

  int of(VertexKind k) const {
    switch (k) {
      case VertexKind::Add: return add;
      case VertexKind::Sub: return sub;
      case VertexKind::Mul: return mul;
      case VertexKind::Alu: return alu;
      default: return 0;
    }
  }
};

struct TimingConfig {
  KindLatencies latency;
  int cadence = 1000;  // cycles available per iteration
  int w_seq = 1;       // cycles per address-adjacent access
  int w_rand = 2;      // cycles per non-adjacent access

  int latency_of(VertexKind k) const { return latency.of(k); }
};

inline std::vector<Diagnostic> validate_config(const TimingConfig& cfg) {
  std::vector<Diagnostic> out;
  if (cfg.cadence < 1) out.push_back({"config", "cadence", "cadence must be >= 1"});
  if (cfg.w_seq < 1) out.push_back({"config", "w_seq", "w_seq must be >= 1"});
  if (cfg.w_seq > cfg.w_rand) out.push_back({"config", "w_rand", "w_seq must not exceed w_rand"});
  for (auto [name, v] : {std::pair{"add", cfg.latency.add}, std::pair{"sub", cfg.latency.sub},
                         std::pair{"mul", cfg.latency.mul}, std::pair{"alu", cfg.latency.alu}})
    if (v < 1) out.push_back({"config", name, "latency must be >= 1"});
  return out;
}

struct TimingAnalysis {
  std::vector<int> asap;
  std::vector<int> alap;
  int critical_path = 0;
  int cadence = 0;

  int mobility(std::size_t v, int cycle) const { return alap[v] - cycle; }
};

// Forward longest path for ASAP and backward pass from the cadence for ALAP.
// Memory accesses are not part of this bound; they are resource constraints.
inline TimingAnalysis timing_analysis(const Sfg& g, const TimingConfig& cfg) {
  if (auto diags = validate_config(cfg); !diags.empty()) throw ValidationError(std::move(diags));
  auto order = precedence_order(g);
  if (!order) throw ValidationError({{"cycle", "", "cycle not broken by a delay vertex"}});

  const std::size_t n = g.size();
  TimingAnalysis ta;
  ta.cadence = cfg.cadence;
  ta.asap.assign(n, 0);
  ta.alap.assign(n, std::numeric_limits<int>::max());

  for (auto v : *order) {
    if (g.vertex(v).kind == VertexKind::Delay) continue;
    const int fin = ta.asap[v] + cfg.latency_of(g.vertex(v).kind);
    for (auto s : g.succs(v)) ta.asap[s] = std::max(ta.asap[s], fin);
  }
  for (std::size_t v = 0; v < n; ++v)
    ta.critical_path = std::max(ta.critical_path, ta.asap[v] + cfg.latency_of(g.vertex(v).kind));

  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const auto v = *it;
    int deadline = cfg.cadence;
    if (g.vertex(v).kind != VertexKind::Delay)
      for (auto s : g.succs(v)) deadline = std::min(deadline, ta.alap[s]);
    ta.alap[v] = deadline - cfg.latency_of(g.vertex(v).kind);
  }

  if (ta.critical_path > cfg.cadence) throw InfeasibleError(ta.critical_path, cfg.cadence);
  return ta;
}

}  // namespace memhls
