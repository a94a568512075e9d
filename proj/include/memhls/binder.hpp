#pragma once

// Post-scheduling analyses: operator allocation, value lifetimes and register
// counting, access accounting per ageing mode, circular-buffer address traces
// and an interconnect estimate from a greedy register binding.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/schedule.hpp"
#include "memhls/scheduler.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace memhls {

// ---------------------------------------------------------------------------
// Operator allocation

struct Allocation {
  ResourceSet resources;
  bool schedulable = false;
  int trials = 0;
  std::string blocked_by;  // last deadline-miss blame when not schedulable
};

// Utilization bound ceil(sum of latencies / cadence) per class, at least one
// operator for every class in use.
inline ResourceSet utilization_bound(const Sfg& g, const TimingConfig& cfg) {
  long work[2] = {0, 0};
  int count[2] = {0, 0};
  for (const auto& v : g.vertices()) {
    if (!is_arithmetic(v.kind)) continue;
    const int c = resource_of(v.kind) == ResourceClass::Mul ? 0 : 1;
    work[c] += cfg.latency_of(v.kind);
    ++count[c];
  }
  ResourceSet r;
  const long cad = std::max(1, cfg.cadence);
  r.mul = count[0] ? static_cast<int>(std::max(1L, (work[0] + cad - 1) / cad)) : 0;
  r.alu = count[1] ? static_cast<int>(std::max(1L, (work[1] + cad - 1) / cad)) : 0;
  return r;
}

// Starts from the utilization bound and adds one operator of the blamed class
// per deadline miss. A miss blamed on a dependence grows the most loaded
// class; a miss blamed on a memory bank ends the search (more operators do
// not create ports). Counts never exceed the number of vertices per class.
// Once schedulable, operators above the utilization bound that the schedule
// can do without are removed again.
inline Allocation allocate_operators(const Sfg& g, const TimingConfig& cfg, const MemoryTable& table) {
  Allocation a;
  a.resources = utilization_bound(g, cfg);
  const int limit[2] = {static_cast<int>(g.count(VertexKind::Mul)),
                        static_cast<int>(g.arithmetic_count() - g.count(VertexKind::Mul))};
  long work[2] = {0, 0};
  for (const auto& v : g.vertices())
    if (is_arithmetic(v.kind)) work[resource_of(v.kind) == ResourceClass::Mul ? 0 : 1] += cfg.latency_of(v.kind);

  const ResourceSet floor = a.resources;
  auto feasible = [&](const ResourceSet& r) {
    ++a.trials;
    try {
      (void)schedule(g, table, r, cfg);
      return true;
    } catch (const DeadlineMiss&) {
      return false;
    }
  };
  // Blame goes to the operation that missed, which can overshoot; give back
  // operators the schedule does not need.
  auto trim = [&] {
    for (bool changed = true; changed;) {
      changed = false;
      for (auto rc : {ResourceClass::Mul, ResourceClass::Alu}) {
        if (a.resources.count(rc) <= floor.count(rc)) continue;
        ResourceSet fewer = a.resources;
        --fewer.count(rc);
        if (feasible(fewer)) {
          a.resources = fewer;
          changed = true;
        }
      }
    }
  };

  for (;;) {
    ++a.trials;
    try {
      (void)schedule(g, table, a.resources, cfg);
      a.schedulable = true;
      a.blocked_by.clear();
      trim();
      return a;
    } catch (const InfeasibleError&) {
      a.blocked_by = "critical-path";
      return a;
    } catch (const DeadlineMiss& miss) {
      a.blocked_by = miss.resource();
      std::optional<ResourceClass> grow;
      if (miss.resource() == "mul")
        grow = ResourceClass::Mul;
      else if (miss.resource() == "alu")
        grow = ResourceClass::Alu;
      else if (miss.resource() == "dependence") {
        double best = -1;
        for (auto rc : {ResourceClass::Mul, ResourceClass::Alu}) {
          const int c = rc == ResourceClass::Mul ? 0 : 1;
          if (a.resources.count(rc) >= limit[c]) continue;
          const double load = static_cast<double>(work[c]) / a.resources.count(rc);
          if (load > best) {
            best = load;
            grow = rc;
          }
        }
      }
      if (!grow) return a;
      const int c = *grow == ResourceClass::Mul ? 0 : 1;
      if (a.resources.count(*grow) >= limit[c]) return a;
      ++a.resources.count(*grow);
    }
  }
}

// ---------------------------------------------------------------------------
// Lifetimes and register count

struct LifetimeInterval {
  std::string name;
  int birth = 0;
  int death = 0;  // half-open [birth, death)

  int length() const { return death - birth; }

  friend bool operator==(const LifetimeInterval&, const LifetimeInterval&) = default;
};

// Maximum number of simultaneously live intervals (what left-edge allocation
// achieves on an interval graph).
inline int max_overlap(const std::vector<LifetimeInterval>& iv) {
  std::vector<std::pair<int, int>> ev;
  for (const auto& i : iv)
    if (i.death > i.birth) {
      ev.emplace_back(i.birth, +1);
      ev.emplace_back(i.death, -1);
    }
  std::sort(ev.begin(), ev.end());
  int cur = 0, peak = 0;
  for (auto [t, d] : ev) {
    cur += d;
    peak = std::max(peak, cur);
  }
  return peak;
}

// Left-edge binding: intervals sorted by birth, each put in the lowest free
// register. Returns the register index per interval (same order as input).
inline std::vector<int> left_edge(const std::vector<LifetimeInterval>& iv) {
  std::vector<std::size_t> order(iv.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return iv[a].birth < iv[b].birth; });
  std::vector<int> reg(iv.size(), -1);
  std::vector<int> free_at;
  for (auto i : order) {
    if (iv[i].death <= iv[i].birth) continue;
    int r = -1;
    for (std::size_t k = 0; k < free_at.size(); ++k)
      if (free_at[k] <= iv[i].birth) {
        r = static_cast<int>(k);
        break;
      }
    if (r < 0) {
      r = static_cast<int>(free_at.size());
      free_at.push_back(0);
    }
    free_at[static_cast<std::size_t>(r)] = iv[i].death;
    reg[i] = r;
  }
  return reg;
}

namespace detail {

// Where an operand comes from, for interconnect purposes.
struct Value {
  LifetimeInterval interval;
  std::string producer;                                   // "mul#0", "bank1", ...
  std::vector<std::tuple<std::string, int>> consumers;    // (operator instance, input slot)
};

inline std::string instance_name(const OperationRecord& op) {
  return std::string(resource_name(op.resource)) + "#" + std::to_string(op.instance);
}

// Every value that occupies a register under the schedule: operation
// results, register-resident data and memory read operands (held from
// the read's end until the consumer finishes).
inline std::vector<Value> register_values(const Schedule& s, const Sfg& g, const MemoryTable& table) {
  std::vector<const OperationRecord*> op(g.size(), nullptr);
  for (const auto& r : s.operations) op[r.vertex] = &r;
  auto finish = [&](std::size_t v) { return op[v] ? op[v]->finish() : 0; };
  auto slot_of = [&](std::size_t consumer, std::size_t pred) {
    const auto& p = g.preds(consumer);
    return static_cast<int>(std::find(p.begin(), p.end(), pred) - p.begin());
  };
  auto in_register = [&](const std::string& label) {
    const auto* e = table.find(label);
    return e && !e->in_memory();
  };

  std::map<std::pair<std::string, std::size_t>, const AccessRecord*> write_of;
  for (const auto& a : s.accesses)
    if (a.direction == AccessDirection::Write) write_of[{a.datum, a.vertex}] = &a;

  std::vector<Value> out;
  const auto by_label = datum_vertices(g);

  // Results of operations, extended over register-resident data they feed.
  for (const auto& r : s.operations) {
    Value v;
    v.interval = {g.vertex(r.vertex).id, r.finish(), r.finish()};
    v.producer = instance_name(r);
    for (auto sx : g.succs(r.vertex)) {
      const auto& sv = g.vertex(sx);
      if (is_arithmetic(sv.kind) && op[sx]) {
        v.interval.death = std::max(v.interval.death, finish(sx));
        v.consumers.emplace_back(instance_name(*op[sx]), slot_of(sx, r.vertex));
      } else if (is_datum(sv.kind)) {
        if (!in_register(sv.label)) {
          auto it = write_of.find({sv.label, r.vertex});
          if (it != write_of.end()) v.interval.death = std::max(v.interval.death, it->second->finish());
          continue;
        }
        if (sv.kind == VertexKind::Delay) {
          v.interval.death = std::max(v.interval.death, s.latency);  // carried to the next iteration
          continue;
        }
        for (auto c : g.succs(sx)) {
          if (g.vertex(c).kind == VertexKind::Delay) v.interval.death = std::max(v.interval.death, s.latency);
          if (!is_arithmetic(g.vertex(c).kind) || !op[c]) continue;
          v.interval.death = std::max(v.interval.death, finish(c));
          v.consumers.emplace_back(instance_name(*op[c]), slot_of(c, sx));
        }
      }
    }
    out.push_back(std::move(v));
  }

  // Register-resident data that exist at iteration start.
  for (const auto& [label, vs] : by_label) {
    if (!in_register(label)) continue;
    std::optional<Value> v;
    for (auto x : vs) {
      const bool produced = g.vertex(x).kind != VertexKind::Delay &&
                            std::any_of(g.preds(x).begin(), g.preds(x).end(),
                                        [&](std::size_t p) { return is_arithmetic(g.vertex(p).kind); });
      if (produced) continue;
      // A loopback delay's value is read through its data vertex.
      if (g.vertex(x).kind == VertexKind::Delay &&
          std::any_of(g.preds(x).begin(), g.preds(x).end(),
                      [&](std::size_t p) { return is_arithmetic(g.vertex(p).kind); }))
        continue;
      if (!v) v = Value{{label, 0, 0}, "init", {}};
      for (auto c : g.succs(x)) {
        if (g.vertex(c).kind == VertexKind::Delay) v->interval.death = std::max(v->interval.death, s.latency);
        if (!is_arithmetic(g.vertex(c).kind) || !op[c]) continue;
        v->interval.death = std::max(v->interval.death, finish(c));
        v->consumers.emplace_back(instance_name(*op[c]), slot_of(c, x));
      }
    }
    if (v) out.push_back(std::move(*v));
  }

  // Operands read from memory.
  for (const auto& a : s.accesses) {
    if (a.direction != AccessDirection::Read || !op[a.vertex]) continue;
    Value v;
    v.interval = {a.datum + ">" + g.vertex(a.vertex).id, a.finish(), finish(a.vertex)};
    v.producer = "bank" + std::to_string(a.bank);
    int slot = 0;
    const auto& p = g.preds(a.vertex);
    for (std::size_t k = 0; k < p.size(); ++k)
      if (is_datum(g.vertex(p[k]).kind) && g.vertex(p[k]).label == a.datum) slot = static_cast<int>(k);
    v.consumers.emplace_back(instance_name(*op[a.vertex]), slot);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

struct RegisterReport {
  int count = 0;
  std::vector<LifetimeInterval> intervals;  // values held in registers
};

// Register requirement: max overlap of the register-class value lifetimes.
// Values whose lifetime reaches `threshold` cycles are left out (they belong
// in memory).
inline RegisterReport register_count(const Schedule& s, const Sfg& g, const MemoryTable& table,
                                     int threshold = std::numeric_limits<int>::max()) {
  RegisterReport r;
  for (auto& v : detail::register_values(s, g, table))
    if (v.interval.length() < threshold) r.intervals.push_back(std::move(v.interval));
  r.count = max_overlap(r.intervals);
  return r;
}

// ---------------------------------------------------------------------------
// Access accounting

enum class AgeingMode { Circular, Shift };

inline constexpr std::string_view mode_name(AgeingMode m) { return m == AgeingMode::Circular ? "circular" : "shift"; }

inline std::optional<AgeingMode> parse_mode(std::string_view s) {
  if (s == "circular") return AgeingMode::Circular;
  if (s == "shift") return AgeingMode::Shift;
  return std::nullopt;
}

struct BankAccesses {
  int reads = 0;
  int writes = 0;

  friend bool operator==(const BankAccesses&, const BankAccesses&) = default;
};

struct AccessReport {
  std::vector<BankAccesses> banks;
  int reads = 0;
  int writes = 0;
  int bursts = 0;  // accesses charged W_seq
  AgeingMode mode = AgeingMode::Circular;

  friend bool operator==(const AccessReport&, const AccessReport&) = default;
};

// Memory-resident ageing vectors: labels newest first, their bank, and the
// base address of the buffer.
struct AgeingBuffer {
  std::vector<std::string> labels;
  int bank = 0;
  int base = 0;
};

inline std::vector<AgeingBuffer> memory_ageing_buffers(const Sfg& g, const MemoryTable& table) {
  std::vector<AgeingBuffer> out;
  for (auto& vec : ageing_vectors(g)) {
    const auto* head = table.find(vec.front());
    if (!head || !head->in_memory()) continue;
    AgeingBuffer b{{}, head->bank, head->address};
    for (const auto& l : vec) {
      const auto* e = table.find(l);
      if (!e || !e->in_memory() || e->bank != head->bank) break;
      b.labels.push_back(l);
      b.base = std::min(b.base, e->address);
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Schedule accesses plus the new-sample writes of every memory-resident
// ageing vector: one per vector (circular buffer) or one per element (shift).
inline AccessReport access_accounting(const Schedule& s, const Sfg& g, const MemoryTable& table, AgeingMode mode) {
  AccessReport r;
  r.mode = mode;
  r.banks.assign(static_cast<std::size_t>(std::max(0, table.bank_count)), {});
  auto bank = [&](int b) -> BankAccesses& {
    if (b >= static_cast<int>(r.banks.size())) r.banks.resize(static_cast<std::size_t>(b) + 1);
    return r.banks[static_cast<std::size_t>(b)];
  };
  for (const auto& a : s.accesses) {
    if (a.direction == AccessDirection::Read)
      ++bank(a.bank).reads;
    else
      ++bank(a.bank).writes;
    if (a.weight == AccessWeight::Seq) ++r.bursts;
  }
  for (const auto& buf : memory_ageing_buffers(g, table))
    bank(buf.bank).writes += mode == AgeingMode::Circular ? 1 : static_cast<int>(buf.labels.size());
  for (const auto& b : r.banks) {
    r.reads += b.reads;
    r.writes += b.writes;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Address trace of the circular buffers

struct TraceEntry {
  int iteration = 0;
  int cycle = 0;
  int bank = 0;
  int address = 0;
  AccessDirection direction = AccessDirection::Read;
  std::string datum;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct AddressTrace {
  std::vector<TraceEntry> entries;
  // pointer[v][i]: physical address of the newest sample of buffer v in iteration i.
  std::vector<std::vector<int>> pointer;
};

// Replays the schedule for `iterations` iterations under circular addressing.
// Element j of a buffer of length L based at B lives at B + ((j - i) mod L)
// in iteration i; each iteration first writes the new sample at the slot of
// the oldest one. Other data keep their table address.
inline AddressTrace address_trace(const Schedule& s, const Sfg& g, const MemoryTable& table, int iterations = 2) {
  AddressTrace tr;
  const auto buffers = memory_ageing_buffers(g, table);
  std::map<std::string, std::pair<std::size_t, int>> slot;  // label -> (buffer, element index)
  for (std::size_t b = 0; b < buffers.size(); ++b)
    for (std::size_t j = 0; j < buffers[b].labels.size(); ++j) slot[buffers[b].labels[j]] = {b, static_cast<int>(j)};
  tr.pointer.assign(buffers.size(), {});

  auto phys = [&](std::size_t b, int j, int i) {
    const int len = static_cast<int>(buffers[b].labels.size());
    return buffers[b].base + (((j - i) % len) + len) % len;
  };
  for (int i = 0; i < iterations; ++i) {
    for (std::size_t b = 0; b < buffers.size(); ++b) {
      tr.pointer[b].push_back(phys(b, 0, i));
      tr.entries.push_back({i, 0, buffers[b].bank, phys(b, 0, i), AccessDirection::Write, buffers[b].labels.front()});
    }
    for (const auto& a : s.accesses) {
      int address = a.address;
      if (auto it = slot.find(a.datum); it != slot.end()) address = phys(it->second.first, it->second.second, i);
      tr.entries.push_back({i, a.start, a.bank, address, a.direction, a.datum});
    }
  }
  return tr;
}

inline std::string emit_trace_csv(const AddressTrace& tr) {
  std::string out = "iteration,cycle,bank,address,direction\n";
  for (const auto& e : tr.entries)
    out += std::to_string(e.iteration) + ',' + std::to_string(e.cycle) + ',' + std::to_string(e.bank) + ',' +
           std::to_string(e.address) + ',' + std::string(direction_name(e.direction)) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Interconnect estimate

struct InterconnectEstimate {
  int registers = 0;
  int mux = 0;       // sum over operator and register inputs of (distinct sources - 1)
  int demux = 0;     // sum over producers of (distinct destination registers - 1)
  int tristate = 0;  // distinct memory bus drivers (banks read)

  friend bool operator==(const InterconnectEstimate&, const InterconnectEstimate&) = default;
};

// Sum over keys of (distinct members - 1) for keys with more than one member.
template <class K>
int fan_count(const std::map<K, std::set<int>>& fan) {
  int n = 0;
  for (const auto& [k, members] : fan)
    if (members.size() > 1) n += static_cast<int>(members.size()) - 1;
  return n;
}

// Greedy binding. Values are taken by birth time; within one birth time the
// value with the strongest affinity to a free register goes first. Affinity:
// the register last held a value for the same operator input (2) or from the
// same producer (1). Registers loaded from several producers need an input
// selector, so their fan-in counts toward `mux` as well.
inline InterconnectEstimate interconnect_estimate(const Schedule& s, const Sfg& g, const MemoryTable& table) {
  auto values = detail::register_values(s, g, table);
  std::map<int, std::vector<std::size_t>> by_birth;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].interval.length() > 0) by_birth[values[i].interval.birth].push_back(i);

  struct Reg {
    int free_at = 0;
    std::set<std::tuple<std::string, int>> consumers;
    std::set<std::string> producers;
  };
  std::vector<Reg> regs;
  std::vector<int> reg_of(values.size(), -1);
  auto affinity = [&](const detail::Value& v, const Reg& r) {
    for (const auto& c : v.consumers)
      if (r.consumers.count(c)) return 2;
    return r.producers.count(v.producer) ? 1 : 0;
  };
  for (auto& [birth, group] : by_birth) {
    std::vector<std::size_t> pending = group;
    while (!pending.empty()) {
      std::size_t pick = 0;
      int pick_reg = -1, pick_score = -1;
      for (std::size_t k = 0; k < pending.size(); ++k) {
        const auto& v = values[pending[k]];
        for (std::size_t r = 0; r < regs.size(); ++r) {
          if (regs[r].free_at > birth) continue;
          const int score = affinity(v, regs[r]);
          if (score > pick_score) {
            pick = k;
            pick_reg = static_cast<int>(r);
            pick_score = score;
          }
        }
      }
      if (pick_reg < 0) {
        pick_reg = static_cast<int>(regs.size());
        regs.emplace_back();
      }
      const auto i = pending[pick];
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
      auto& reg = regs[static_cast<std::size_t>(pick_reg)];
      reg.free_at = values[i].interval.death;
      reg.consumers.insert(values[i].consumers.begin(), values[i].consumers.end());
      reg.producers.insert(values[i].producer);
      reg_of[i] = pick_reg;
    }
  }

  std::map<std::tuple<std::string, int>, std::set<int>> inputs;
  std::map<std::string, std::set<int>> outputs;
  std::map<int, std::set<int>> loads;  // register -> producers
  std::map<std::string, int> producer_id;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (reg_of[i] < 0) continue;
    for (const auto& c : values[i].consumers) inputs[c].insert(reg_of[i]);
    if (values[i].producer == "init") continue;
    outputs[values[i].producer].insert(reg_of[i]);
    const int pid = producer_id.try_emplace(values[i].producer, static_cast<int>(producer_id.size())).first->second;
    loads[reg_of[i]].insert(pid);
  }
  std::set<int> read_banks;
  for (const auto& a : s.accesses)
    if (a.direction == AccessDirection::Read) read_banks.insert(a.bank);

  InterconnectEstimate est;
  est.registers = static_cast<int>(regs.size());
  est.mux = fan_count(inputs) + fan_count(loads);
  est.demux = fan_count(outputs);
  est.tristate = static_cast<int>(read_banks.size());
  return est;
}

}  // namespace memhls
