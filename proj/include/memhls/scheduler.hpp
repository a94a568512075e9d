#pragma once

// Mobility-priority list scheduling under operator counts and memory
// accessibility.
//
// Each cycle the ready operations (all predecessors finished) are ranked by
// mobility (ALAP deadline minus the current cycle), then by burst
// continuation, then by position in the bank's fastest pending sequence, then
// by vertex index. A candidate whose bank has no idle port is dropped for the
// cycle regardless of its rank. Memory reads are charged on the bank's ports
// right before their consumer starts; result writes go to memory after the
// producer finishes and compete for the same ports.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/mcg.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/schedule.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace memhls {

struct AccessRequest {
  std::string datum;
  int bank = 0;
  int address = 0;
};

// One entry of the ready list. `key` orders ties last (vertex index for
// operations).
struct Candidate {
  std::size_t key = 0;
  int mobility = 0;
  std::vector<AccessRequest> accesses;
};

namespace detail {

inline int burst_score(const Candidate& c, const std::vector<PortState>& ports, int cycle) {
  int score = 0;
  for (const auto& a : c.accesses) {
    const auto& bank = ports[static_cast<std::size_t>(a.bank)];
    for (const auto& p : bank.ports)
      if (p.busy_until <= cycle && weight_between(p.last_address, a.address) == AccessWeight::Seq) {
        ++score;
        break;
      }
  }
  return score;
}

inline bool banks_accessible(const Candidate& c, const std::vector<PortState>& ports, int cycle) {
  for (const auto& a : c.accesses)
    if (!port_accessible(ports[static_cast<std::size_t>(a.bank)], cycle)) return false;
  return true;
}

}  // namespace detail

// Candidates in priority order. Accessibility is not applied here.
inline std::vector<std::size_t> rank_candidates(const std::vector<Candidate>& ready,
                                                const std::vector<PortState>& ports, const std::vector<Mcg>& mcgs,
                                                int cycle) {
  // Heads of each bank's fastest sequence over the pending accesses.
  std::vector<std::set<std::string>> pending(mcgs.size());
  for (const auto& c : ready)
    for (const auto& a : c.accesses) pending[static_cast<std::size_t>(a.bank)].insert(a.datum);
  std::vector<std::optional<std::string>> head(mcgs.size());
  for (std::size_t b = 0; b < mcgs.size(); ++b) {
    if (pending[b].size() < 2) continue;
    auto seq = fastest_sequence(mcgs[b], pending[b]);
    if (seq.size() >= 2) head[b] = seq.front();
  }

  struct Key {
    int mobility;
    int burst;
    int hint;
    std::size_t key;
  };
  std::vector<Key> keys;
  keys.reserve(ready.size());
  for (const auto& c : ready) {
    int hint = 0;
    for (const auto& a : c.accesses)
      if (head[static_cast<std::size_t>(a.bank)] == a.datum) hint = 1;
    keys.push_back({c.mobility, detail::burst_score(c, ports, cycle), hint, c.key});
  }
  std::vector<std::size_t> order(ready.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = keys[a];
    const auto& y = keys[b];
    if (x.mobility != y.mobility) return x.mobility < y.mobility;
    if (x.burst != y.burst) return x.burst > y.burst;
    if (x.hint != y.hint) return x.hint > y.hint;
    return x.key < y.key;
  });
  return order;
}

// The highest-priority candidate whose banks all have an idle port.
inline std::optional<std::size_t> select_operation(const std::vector<Candidate>& ready,
                                                   const std::vector<PortState>& ports,
                                                   const std::vector<Mcg>& mcgs, int cycle) {
  for (auto i : rank_candidates(ready, ports, mcgs, cycle))
    if (detail::banks_accessible(ready[i], ports, cycle)) return ready[i].key;
  return std::nullopt;
}

namespace detail {

struct ReadTask {
  std::string datum;
  int bank;
  int address;
  std::optional<std::size_t> gate_write;  // value produced this iteration
  int finish = -1;                        // -1 until issued
};

struct WriteTask {
  std::string datum;
  int bank;
  int address;
  std::size_t producer;
  std::vector<std::size_t> war_reads;  // reads of the old value
  int deadline = 0;                    // latest start
  int finish = -1;
};

struct OpTask {
  std::size_t vertex;
  ResourceClass resource;
  int latency;
  std::vector<std::size_t> op_preds;  // indices into ops
  std::vector<std::size_t> reads;     // indices into reads
  std::vector<std::size_t> gate_writes;
  int operands_at = -1;  // when the issued reads complete; -1 until issued
  int start = -1;
  std::string blocked_by = "dependence";
};

}  // namespace detail

inline Schedule schedule(const Sfg& g, const MemoryTable& table, const ResourceSet& resources,
                         const TimingConfig& cfg) {
  if (auto d = validate_mapping(table, g); !d.empty()) throw ValidationError(std::move(d));
  const auto ta = timing_analysis(g, cfg);
  const auto mcgs = build_all_mcgs(table);

  using detail::OpTask;
  using detail::ReadTask;
  using detail::WriteTask;

  std::vector<OpTask> ops;
  std::vector<ReadTask> reads;
  std::vector<WriteTask> writes;
  std::vector<std::optional<std::size_t>> op_of(g.size());

  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto k = g.vertex(v).kind;
    if (!is_arithmetic(k)) continue;
    const auto rc = resource_of(k);
    if (resources.count(rc) < 1)
      throw ValidationError({{"resources", std::string(resource_name(rc)), "no operator for " + g.vertex(v).id}});
    op_of[v] = ops.size();
    ops.push_back({v, rc, cfg.latency_of(k), {}, {}, {}});
  }

  // Writes: an operation feeding a memory-resident datum stores its result.
  std::map<std::string, std::size_t> write_of;
  for (const auto& op : ops)
    for (auto s : g.succs(op.vertex)) {
      if (!is_datum(g.vertex(s).kind)) continue;
      const auto* e = table.find(g.vertex(s).label);
      if (!e || !e->in_memory()) continue;
      if (write_of.count(e->name)) throw Error("datum '" + e->name + "' has more than one producer");
      write_of[e->name] = writes.size();
      writes.push_back({e->name, e->bank, e->address, op.vertex, {}, cfg.cadence - cfg.w_rand, -1});
    }

  // Operands.
  for (auto& op : ops) {
    for (auto p : g.preds(op.vertex)) {
      const auto& pv = g.vertex(p);
      if (is_arithmetic(pv.kind)) {
        op.op_preds.push_back(*op_of[p]);
        continue;
      }
      if (!is_datum(pv.kind)) continue;
      const auto* e = table.find(pv.label);
      // Produced this iteration (not through a delay): wait for the producer.
      std::optional<std::size_t> producer;
      if (pv.kind != VertexKind::Delay)
        for (auto pp : g.preds(p))
          if (is_arithmetic(g.vertex(pp).kind)) producer = *op_of[pp];
      if (!e->in_memory()) {
        if (producer) op.op_preds.push_back(*producer);
        continue;
      }
      ReadTask r{e->name, e->bank, e->address, std::nullopt, -1};
      if (producer) {
        r.gate_write = write_of.at(e->name);
        op.gate_writes.push_back(*r.gate_write);
      }
      op.reads.push_back(reads.size());
      reads.push_back(std::move(r));
    }
    std::sort(op.reads.begin(), op.reads.end(), [&](std::size_t a, std::size_t b) {
      return std::pair{reads[a].bank, reads[a].address} < std::pair{reads[b].bank, reads[b].address};
    });
  }
  for (std::size_t r = 0; r < reads.size(); ++r) {
    auto it = write_of.find(reads[r].datum);
    if (it == write_of.end()) continue;
    if (reads[r].gate_write) continue;
    writes[it->second].war_reads.push_back(r);
  }
  // A write that feeds readers this iteration must leave them time to read.
  for (const auto& op : ops)
    for (auto w : op.gate_writes)
      writes[w].deadline = std::min(writes[w].deadline, ta.alap[op.vertex] - 2 * cfg.w_rand);

  std::vector<PortState> ports(static_cast<std::size_t>(table.bank_count), PortState(table.ports_per_bank));
  std::vector<std::vector<int>> operator_busy = {std::vector<int>(static_cast<std::size_t>(resources.mul), 0),
                                                 std::vector<int>(static_cast<std::size_t>(resources.alu), 0)};
  auto unit_free_at = [&](ResourceClass rc, int cycle) {
    const auto& busy = operator_busy[rc == ResourceClass::Mul ? 0 : 1];
    return std::any_of(busy.begin(), busy.end(), [cycle](int b) { return b <= cycle; });
  };

  Schedule out;
  std::vector<std::size_t> open_ops(ops.size()), open_writes(writes.size());
  for (std::size_t i = 0; i < ops.size(); ++i) open_ops[i] = i;
  for (std::size_t i = 0; i < writes.size(); ++i) open_writes[i] = i;
  std::vector<int> write_blocked(writes.size(), 0);

  auto op_finish = [&](std::size_t i) { return ops[i].start < 0 ? -1 : ops[i].start + ops[i].latency; };
  auto op_ready = [&](const OpTask& op, int t) {
    for (auto p : op.op_preds) {
      const int f = op_finish(p);
      if (f < 0 || f > t) return false;
    }
    for (auto w : op.gate_writes)
      if (writes[w].finish < 0 || writes[w].finish > t) return false;
    return true;
  };
  auto write_ready = [&](const WriteTask& w, int t) {
    const int f = op_finish(*op_of[w.producer]);
    if (f < 0 || f > t) return false;
    for (auto r : w.war_reads)
      if (reads[r].finish < 0 || reads[r].finish > t) return false;
    return true;
  };

  const std::size_t write_key_base = g.size();
  int t = 0;
  while (!open_ops.empty() || !open_writes.empty()) {
    std::vector<Candidate> cands;
    std::vector<std::pair<bool, std::size_t>> what;  // (is_write, task index)
    for (auto i : open_ops) {
      if (!op_ready(ops[i], t)) continue;
      const bool issued = ops[i].operands_at >= 0;
      if (issued && ops[i].operands_at > t) continue;  // operands still in flight
      Candidate c{ops[i].vertex, ta.mobility(ops[i].vertex, t), {}};
      if (!issued)
        for (auto r : ops[i].reads) c.accesses.push_back({reads[r].datum, reads[r].bank, reads[r].address});
      cands.push_back(std::move(c));
      what.emplace_back(false, i);
    }
    for (auto i : open_writes) {
      if (!write_ready(writes[i], t)) continue;
      cands.push_back({write_key_base + i, writes[i].deadline - t, {{writes[i].datum, writes[i].bank, writes[i].address}}});
      what.emplace_back(true, i);
    }

    if (!cands.empty()) {
      for (auto ci : rank_candidates(cands, ports, mcgs, t)) {
        const auto [is_write, idx] = what[ci];
        const auto& cand = cands[ci];
        if (!detail::banks_accessible(cand, ports, t)) {
          ++out.bank_conflicts;
          if (is_write) {
            write_blocked[idx] = 1;
            continue;
          }
          for (const auto& a : cand.accesses)
            if (!port_accessible(ports[static_cast<std::size_t>(a.bank)], t)) {
              ops[idx].blocked_by = "bank" + std::to_string(a.bank);
              break;
            }
          continue;
        }

        if (is_write) {
          auto& w = writes[idx];
          auto& bank = ports[static_cast<std::size_t>(w.bank)];
          const auto port = *bank.idle_port(t, w.address);
          const auto grant = begin_access(bank, port, w.address, t, cfg);
          w.finish = grant.finish;
          out.accesses.push_back({w.datum, AccessDirection::Write, w.producer, grant.start, w.bank,
                                  static_cast<int>(port), grant.weight, grant.finish - grant.start, w.address});
          continue;
        }

        auto& op = ops[idx];
        if (op.operands_at < 0 && !op.reads.empty()) {
          // Issue the operand reads, planned on a scratch copy of the ports.
          std::map<int, PortState> scratch;
          std::vector<AccessRecord> planned;
          int ready_at = t;
          for (auto r : op.reads) {
            const auto& rd = reads[r];
            auto it = scratch.find(rd.bank);
            if (it == scratch.end()) it = scratch.emplace(rd.bank, ports[static_cast<std::size_t>(rd.bank)]).first;
            auto& st = it->second;
            // Earliest-free port, preferring a sequential continuation.
            std::size_t best = 0;
            int best_start = std::numeric_limits<int>::max();
            bool best_seq = false;
            for (std::size_t p = 0; p < st.ports.size(); ++p) {
              const int start = std::max(t, st.ports[p].busy_until);
              const bool seq = weight_between(st.ports[p].last_address, rd.address) == AccessWeight::Seq;
              if (start < best_start || (start == best_start && seq && !best_seq)) {
                best = p;
                best_start = start;
                best_seq = seq;
              }
            }
            const auto grant = begin_access(st, best, rd.address, best_start, cfg);
            planned.push_back({rd.datum, AccessDirection::Read, op.vertex, grant.start, rd.bank,
                               static_cast<int>(best), grant.weight, grant.finish - grant.start, rd.address});
            ready_at = std::max(ready_at, grant.finish);
          }
          // Only read when an operator will be free to consume the operands.
          if (!unit_free_at(op.resource, ready_at)) {
            op.blocked_by = std::string(resource_name(op.resource));
            continue;
          }
          if (ready_at > ta.alap[op.vertex]) throw DeadlineMiss(t, g.vertex(op.vertex).id, "bank" + std::to_string(planned.back().bank));
          for (auto& [b, st] : scratch) ports[static_cast<std::size_t>(b)] = st;
          for (std::size_t k = 0; k < op.reads.size(); ++k) reads[op.reads[k]].finish = planned[k].finish();
          for (auto& a : planned) out.accesses.push_back(std::move(a));
          op.operands_at = ready_at;
          continue;
        }

        // Operands are in: start on the free instance that became idle last.
        auto& busy = operator_busy[op.resource == ResourceClass::Mul ? 0 : 1];
        std::optional<std::size_t> inst;
        for (std::size_t u = 0; u < busy.size(); ++u)
          if (busy[u] <= t && (!inst || busy[u] > busy[*inst])) inst = u;
        if (!inst) {
          op.blocked_by = std::string(resource_name(op.resource));
          continue;
        }
        busy[*inst] = t + op.latency;
        op.start = t;
        out.operations.push_back({op.vertex, t, op.latency, op.resource, static_cast<int>(*inst)});
      }
    }

    open_ops.erase(std::remove_if(open_ops.begin(), open_ops.end(), [&](std::size_t i) { return ops[i].start >= 0; }),
                   open_ops.end());
    open_writes.erase(
        std::remove_if(open_writes.begin(), open_writes.end(), [&](std::size_t i) { return writes[i].finish >= 0; }),
        open_writes.end());

    // Next cycle; when nothing was ready, jump to the next completion.
    int next = t + 1;
    if (cands.empty()) {
      int ev = std::numeric_limits<int>::max();
      for (const auto& op : ops)
        if (op.start >= 0 && op.start + op.latency > t) ev = std::min(ev, op.start + op.latency);
      for (const auto& w : writes)
        if (w.finish > t) ev = std::min(ev, w.finish);
      for (const auto& r : reads)
        if (r.finish > t) ev = std::min(ev, r.finish);
      if (ev != std::numeric_limits<int>::max()) next = ev;
    }

    for (auto i : open_ops)
      if (ta.alap[ops[i].vertex] < next) throw DeadlineMiss(t, g.vertex(ops[i].vertex).id, ops[i].blocked_by);
    for (auto i : open_writes)
      if (next + cfg.w_seq > cfg.cadence)
        throw DeadlineMiss(t, "write " + writes[i].datum,
                           write_blocked[i] ? "bank" + std::to_string(writes[i].bank) : "dependence");
    for (auto& op : ops) op.blocked_by = "dependence";
    std::fill(write_blocked.begin(), write_blocked.end(), 0);
    t = next;
  }

  for (const auto& w : writes)
    if (w.finish > cfg.cadence) throw DeadlineMiss(w.finish, "write " + w.datum, "bank" + std::to_string(w.bank));

  std::sort(out.operations.begin(), out.operations.end(), [](const OperationRecord& a, const OperationRecord& b) {
    return a.start != b.start ? a.start < b.start : a.vertex < b.vertex;
  });
  std::stable_sort(out.accesses.begin(), out.accesses.end(), [](const AccessRecord& a, const AccessRecord& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.bank != b.bank) return a.bank < b.bank;
    return a.port < b.port;
  });
  for (const auto& op : out.operations) out.latency = std::max(out.latency, op.finish());
  for (const auto& a : out.accesses) out.latency = std::max(out.latency, a.finish());
  return out;
}

}  // namespace memhls
