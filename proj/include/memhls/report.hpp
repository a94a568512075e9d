#pragma once

// One synthesis run end to end: validate, allocate (optional), schedule,
// verify, account, and summarise as a versioned JSON report.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memhls/binder.hpp"
#include "memhls/error.hpp"
#include "memhls/mcg.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/schedule.hpp"
#include "memhls/scheduler.hpp"
#include "memhls/sfg.hpp"
#include "memhls/sfg_text.hpp"
#include "memhls/timing.hpp"
#include "memhls/verify.hpp"

namespace memhls {

inline constexpr int kReportSchemaVersion = 1;

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct SynthesisOptions {
  TimingConfig cfg;
  std::optional<ResourceSet> resources;  // nullopt: allocate from the cadence
  AgeingMode mode = AgeingMode::Circular;
  int register_threshold = std::numeric_limits<int>::max();
};

struct SynthesisReport {
  std::string input_digest;
  TimingConfig cfg;
  ResourceSet resources;
  int banks = 1;
  int ports = 1;
  int latency = 0;
  AccessReport access;
  int registers = 0;
  InterconnectEstimate interconnect;
  int bank_conflicts = 0;
  int allocation_trials = 0;
  double synth_time_ms = 0.0;
  std::vector<Diagnostic> diagnostics;  // verify_schedule findings; empty on success
};

struct SynthesisResult {
  Schedule schedule;
  SynthesisReport report;
};

// Digest of everything that determines the result: graph, mapping, timing,
// resources requested and accounting mode.
inline std::string input_digest(const Sfg& g, const MemoryTable& table, const SynthesisOptions& opt) {
  std::ostringstream os;
  const auto& c = opt.cfg;
  os << "cadence=" << c.cadence << " wseq=" << c.w_seq << " wrand=" << c.w_rand << " add=" << c.latency.add
     << " sub=" << c.latency.sub << " mul=" << c.latency.mul << " alu=" << c.latency.alu
     << " mode=" << mode_name(opt.mode) << " threshold=" << opt.register_threshold;
  if (opt.resources) os << " ops=" << opt.resources->mul << "m" << opt.resources->alu << "a";
  auto h = fnv1a(emit_sfg(g));
  h = fnv1a(emit_mapping(table), h);
  h = fnv1a(os.str(), h);
  return hex64(h);
}

// Recomputes every report count from a stored schedule.
inline SynthesisReport summarize(const Schedule& s, const Sfg& g, const MemoryTable& table, const ResourceSet& r,
                                 const SynthesisOptions& opt) {
  SynthesisReport rep;
  rep.input_digest = input_digest(g, table, opt);
  rep.cfg = opt.cfg;
  rep.resources = r;
  rep.banks = table.bank_count;
  rep.ports = table.ports_per_bank;
  rep.latency = s.latency;
  rep.access = access_accounting(s, g, table, opt.mode);
  rep.registers = register_count(s, g, table, opt.register_threshold).count;
  rep.interconnect = interconnect_estimate(s, g, table);
  rep.bank_conflicts = s.bank_conflicts;
  rep.diagnostics = verify_schedule(s, g, table, r, opt.cfg);
  return rep;
}

// Throws ValidationError for bad inputs, InfeasibleError when the critical
// path exceeds the cadence and DeadlineMiss when the resources do not fit.
inline SynthesisResult run_synthesis(const Sfg& g, const MemoryTable& table, const SynthesisOptions& opt) {
  if (auto d = validate_sfg(g); !d.empty()) throw ValidationError(std::move(d));
  if (auto d = validate_mapping(table, g); !d.empty()) throw ValidationError(std::move(d));
  if (auto d = validate_config(opt.cfg); !d.empty()) throw ValidationError(std::move(d));

  const auto t0 = std::chrono::steady_clock::now();
  ResourceSet r;
  int trials = 0;
  if (opt.resources) {
    r = *opt.resources;
  } else {
    const auto a = allocate_operators(g, opt.cfg, table);
    trials = a.trials;
    r = a.resources;
    // An unschedulable allocation still goes through schedule() so the
    // caller gets the deadline miss with its blocking resource.
  }
  SynthesisResult out;
  out.schedule = schedule(g, table, r, opt.cfg);
  out.report = summarize(out.schedule, g, table, r, opt);
  out.report.allocation_trials = trials;
  out.report.synth_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json report_json(const SynthesisReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input_digest"] = r.input_digest;
  j["timing"] = {{"cadence", r.cfg.cadence},
                 {"w_seq", r.cfg.w_seq},
                 {"w_rand", r.cfg.w_rand},
                 {"latency", {{"add", r.cfg.latency.add},
                              {"sub", r.cfg.latency.sub},
                              {"mul", r.cfg.latency.mul},
                              {"alu", r.cfg.latency.alu}}}};
  j["memory"] = {{"banks", r.banks}, {"ports_per_bank", r.ports}};
  j["resources"] = {{"mul", r.resources.mul}, {"alu", r.resources.alu}};
  j["latency_cycles"] = r.latency;
  ordered_json banks = ordered_json::array();
  for (std::size_t b = 0; b < r.access.banks.size(); ++b)
    banks.push_back({{"bank", b}, {"reads", r.access.banks[b].reads}, {"writes", r.access.banks[b].writes}});
  j["accesses"] = {{"mode", mode_name(r.access.mode)},
                   {"reads", r.access.reads},
                   {"writes", r.access.writes},
                   {"bursts", r.access.bursts},
                   {"per_bank", banks}};
  j["registers"] = r.registers;
  j["interconnect"] = {{"registers", r.interconnect.registers},
                       {"mux", r.interconnect.mux},
                       {"demux", r.interconnect.demux},
                       {"tristate", r.interconnect.tristate}};
  j["bank_conflicts"] = r.bank_conflicts;
  j["allocation_trials"] = r.allocation_trials;
  ordered_json diags = ordered_json::array();
  for (const auto& d : r.diagnostics) diags.push_back({{"code", d.code}, {"subject", d.subject}, {"message", d.message}});
  j["diagnostics"] = diags;
  j["synth_time_ms"] = r.synth_time_ms;
  return j;
}

inline std::string report_text(const SynthesisReport& r) { return report_json(r).dump(2) + "\n"; }

// SFG as DOT; operations annotated with their start cycle when a schedule is given.
inline void write_sfg_dot(std::ostream& os, const Sfg& g, const Schedule* s = nullptr) {
  os << "digraph sfg {\n";
  os << "  node [fontname=Courier];\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& vx = g.vertex(v);
    std::string shape = is_arithmetic(vx.kind) ? "circle" : is_datum(vx.kind) ? "box" : "point";
    if (vx.kind == VertexKind::Delay) shape = "box3d";
    os << "  \"" << vx.id << "\" [shape=" << shape << ", label=\"" << vx.id;
    if (is_arithmetic(vx.kind)) {
      os << "\\n" << kind_name(vx.kind);
      if (s)
        if (const auto* op = s->operation_of(v)) os << " @" << op->start;
    }
    os << "\"];\n";
  }
  for (const auto& e : g.edges())
    os << "  \"" << g.vertex(e.src).id << "\" -> \"" << g.vertex(e.dst).id << "\""
       << (g.is_precedence(e) ? "" : " [style=dashed]") << ";\n";
  os << "}\n";
}

}  // namespace memhls
