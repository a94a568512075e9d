#pragma once

// Design-space exploration over the benchmark generators: reference
// configurations, mapping families and cadence/bank sweeps. Failed points
// are rows of the result, not aborts.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "memhls/benchmarks.hpp"
#include "memhls/binder.hpp"
#include "memhls/error.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/report.hpp"
#include "memhls/timing.hpp"

namespace memhls {

enum class Benchmark { Fir, Lms, Fft };

inline constexpr std::string_view benchmark_name(Benchmark b) {
  switch (b) {
    case Benchmark::Fir: return "fir";
    case Benchmark::Lms: return "lms";
    case Benchmark::Fft: return "fft";
  }
  return "?";
}

inline std::optional<Benchmark> parse_benchmark(std::string_view s) {
  if (s == "fir") return Benchmark::Fir;
  if (s == "lms") return Benchmark::Lms;
  if (s == "fft") return Benchmark::Fft;
  return std::nullopt;
}

inline Sfg benchmark_graph(Benchmark b, std::size_t n) {
  switch (b) {
    case Benchmark::Fir: return gen_fir(n);
    case Benchmark::Lms: return gen_lms(n);
    case Benchmark::Fft: return gen_fft(n);
  }
  throw Error("unknown benchmark");
}

// Reference operator latencies: single-cycle MAC parts for the filters,
// two-cycle operators for the FFT. w_seq = 1, w_rand = 2.
inline TimingConfig benchmark_timing(Benchmark b) {
  TimingConfig cfg;
  const int lat = b == Benchmark::Fft ? 2 : 1;
  cfg.latency = {lat, lat, lat, lat};
  return cfg;
}

// Interleave block that gives every bank one contiguous run of the data.
inline int contiguous_block(const MemoryTable& table, int banks) {
  const int count = static_cast<int>(table.entries.size());
  return std::max(1, (count + banks - 1) / std::max(1, banks));
}

// Reference mapping. interleave_k > 0 selects the map2_k family (auto_place
// with that block size, everything in memory); 0 selects the benchmark's
// default: filters keep coefficients h in bank 0 and samples x in bank 1
// (scalars in registers); the FFT deals its samples in contiguous blocks.
inline MemoryTable reference_mapping(Benchmark b, const Sfg& g, int banks, int interleave_k = 0, int ports = 1) {
  if (banks < 1) throw Error("reference_mapping: banks must be >= 1");
  const auto table = extract_table(g);
  MemoryTable out;
  if (interleave_k > 0 || b == Benchmark::Fft) {
    const auto life = datum_lifetimes(g, benchmark_timing(b));
    out = auto_place(table, life, 0, banks, interleave_k > 0 ? interleave_k : contiguous_block(table, banks));
  } else {
    out = place_arrays(table, {{"h", 0}, {"x", banks > 1 ? 1 : 0}}, banks);
  }
  out.ports_per_bank = ports;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  Benchmark benchmark = Benchmark::Fir;
  std::vector<std::size_t> sizes;
  std::vector<int> cadences;
  std::vector<int> banks{2};
  std::vector<int> interleave{0};  // 0: reference mapping
  int ports = 1;
  AgeingMode mode = AgeingMode::Circular;
  TimingConfig timing = benchmark_timing(Benchmark::Fir);  // cadence overridden per point
  std::optional<ResourceSet> resources;                    // nullopt: allocate per point
};

struct SweepRow {
  Benchmark benchmark = Benchmark::Fir;
  std::size_t n = 0;
  int cadence = 0;
  int banks = 0;
  int ports = 1;
  int interleave = 0;
  AgeingMode mode = AgeingMode::Circular;
  std::string status;  // ok | unschedulable | infeasible | error
  std::string reason;
  ResourceSet resources{0, 0};
  int latency = 0;
  int reads = 0;
  int writes = 0;
  int bursts = 0;
  int registers = 0;
  int bank_conflicts = 0;
  int diagnostics = 0;
  double synth_ms = 0.0;

  bool ok() const { return status == "ok"; }
};

inline SweepRow sweep_point(Benchmark b, std::size_t n, const Sfg& g, const MemoryTable& table, int cadence,
                            int interleave, const SweepSpec& spec) {
  SweepRow row;
  row.benchmark = b;
  row.n = n;
  row.cadence = cadence;
  row.banks = table.bank_count;
  row.ports = table.ports_per_bank;
  row.interleave = interleave;
  row.mode = spec.mode;
  SynthesisOptions opt;
  opt.cfg = spec.timing;
  opt.cfg.cadence = cadence;
  opt.mode = spec.mode;
  try {
    ResourceSet r;
    if (spec.resources) {
      r = *spec.resources;
    } else {
      const auto a = allocate_operators(g, opt.cfg, table);
      r = a.resources;
      row.resources = r;
      if (!a.schedulable) {
        row.status = a.blocked_by == "critical-path" ? "infeasible" : "unschedulable";
        row.reason = "blocked by " + a.blocked_by;
        return row;
      }
    }
    opt.resources = r;
    const auto res = run_synthesis(g, table, opt);
    row.status = "ok";
    row.resources = r;
    row.latency = res.report.latency;
    row.reads = res.report.access.reads;
    row.writes = res.report.access.writes;
    row.bursts = res.report.access.bursts;
    row.registers = res.report.registers;
    row.bank_conflicts = res.report.bank_conflicts;
    row.diagnostics = static_cast<int>(res.report.diagnostics.size());
    row.synth_ms = res.report.synth_time_ms;
  } catch (const InfeasibleError& e) {
    row.status = "infeasible";
    row.reason = e.what();
  } catch (const DeadlineMiss& e) {
    row.status = "unschedulable";
    row.reason = "blocked by " + e.resource();
  } catch (const std::exception& e) {
    row.status = "error";
    row.reason = e.what();
  }
  return row;
}

// Cross product in parameter order: size, interleave, banks, cadence.
inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.sizes.empty() || spec.cadences.empty() || spec.banks.empty() || spec.interleave.empty())
    throw Error("sweep: every parameter list must be nonempty");
  std::vector<SweepRow> rows;
  for (auto n : spec.sizes) {
    std::optional<Sfg> g;
    std::string failure;
    try {
      g = benchmark_graph(spec.benchmark, n);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    for (int k : spec.interleave)
      for (int banks : spec.banks) {
        std::optional<MemoryTable> table;
        std::string map_failure = failure;
        if (g) try {
            table = reference_mapping(spec.benchmark, *g, banks, k, spec.ports);
          } catch (const std::exception& e) {
            map_failure = e.what();
          }
        for (int cadence : spec.cadences) {
          if (!table) {
            SweepRow row;
            row.benchmark = spec.benchmark;
            row.n = n;
            row.cadence = cadence;
            row.banks = banks;
            row.ports = spec.ports;
            row.interleave = k;
            row.mode = spec.mode;
            row.status = "error";
            row.reason = map_failure;
            rows.push_back(std::move(row));
            continue;
          }
          rows.push_back(sweep_point(spec.benchmark, n, *g, *table, cadence, k, spec));
        }
      }
  }
  return rows;
}

// Fewest banks (among the swept counts) with an ok row for each
// (size, interleave, cadence); absent when no count worked.
inline std::map<std::tuple<std::size_t, int, int>, int> min_feasible_banks(const std::vector<SweepRow>& rows) {
  std::map<std::tuple<std::size_t, int, int>, int> out;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    auto key = std::tuple{r.n, r.interleave, r.cadence};
    auto it = out.find(key);
    if (it == out.end() || r.banks < it->second) out[key] = r.banks;
  }
  return out;
}

inline constexpr std::string_view kSweepHeader =
    "generator,n,cadence,banks,ports,interleave,mode,status,reason,mul,alu,latency,reads,writes,bursts,"
    "registers,bank_conflicts,diagnostics,synth_ms";

inline std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.3f", r.synth_ms);
    os << benchmark_name(r.benchmark) << ',' << r.n << ',' << r.cadence << ',' << r.banks << ',' << r.ports << ','
       << r.interleave << ',' << mode_name(r.mode) << ',' << r.status << ',' << reason << ',' << r.resources.mul
       << ',' << r.resources.alu << ',' << r.latency << ',' << r.reads << ',' << r.writes << ',' << r.bursts << ','
       << r.registers << ',' << r.bank_conflicts << ',' << r.diagnostics << ',' << ms << '\n';
  }
  return os.str();
}

}  // namespace memhls
