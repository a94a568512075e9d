#pragma once

// Independent schedule checker. It rebuilds every expectation from the SFG
// and the memory table and never calls into the scheduler.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/schedule.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace memhls {

namespace detail {

// Maximum number of half-open intervals [start, finish) alive at once.
inline int peak_overlap(std::vector<std::pair<int, int>> intervals) {
  std::vector<std::pair<int, int>> ev;
  for (auto [s, f] : intervals)
    if (f > s) {
      ev.emplace_back(s, +1);
      ev.emplace_back(f, -1);
    }
  std::sort(ev.begin(), ev.end());  // -1 sorts before +1 at equal time
  int cur = 0, peak = 0;
  for (auto [tm, d] : ev) {
    cur += d;
    peak = std::max(peak, cur);
  }
  return peak;
}

}  // namespace detail

inline std::vector<Diagnostic> verify_schedule(const Schedule& s, const Sfg& g, const MemoryTable& table,
                                               const ResourceSet& resources, const TimingConfig& cfg) {
  std::vector<Diagnostic> out;
  auto id = [&](std::size_t v) { return g.vertex(v).id; };

  // Operations.
  std::map<std::size_t, const OperationRecord*> op;
  for (const auto& r : s.operations) {
    if (r.vertex >= g.size() || !is_arithmetic(g.vertex(r.vertex).kind)) {
      out.push_back({"unexpected-op", r.vertex < g.size() ? id(r.vertex) : "?", "not an arithmetic vertex"});
      continue;
    }
    if (!op.emplace(r.vertex, &r).second) out.push_back({"duplicate-op", id(r.vertex), "scheduled twice"});
    const auto k = g.vertex(r.vertex).kind;
    if (r.duration != cfg.latency_of(k))
      out.push_back({"op-duration", id(r.vertex), "duration " + std::to_string(r.duration)});
    if (r.resource != resource_of(k)) out.push_back({"op-resource", id(r.vertex), "wrong operator class"});
    if (r.instance < 0 || r.instance >= resources.count(r.resource))
      out.push_back({"op-resource", id(r.vertex), "instance " + std::to_string(r.instance) + " out of range"});
    if (r.start < 0) out.push_back({"op-start", id(r.vertex), "negative start"});
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    if (is_arithmetic(g.vertex(v).kind) && !op.count(v)) out.push_back({"missing-op", id(v), "not scheduled"});

  // Expected accesses: one read per memory-resident operand edge, one write
  // per memory-resident result edge.
  using AccessKey = std::tuple<std::string, AccessDirection, std::size_t>;
  std::map<AccessKey, int> expected;
  for (const auto& e : g.edges()) {
    const auto& a = g.vertex(e.src);
    const auto& b = g.vertex(e.dst);
    if (is_datum(a.kind) && is_arithmetic(b.kind)) {
      const auto* m = table.find(a.label);
      if (m && m->in_memory()) ++expected[{a.label, AccessDirection::Read, e.dst}];
    }
    if (is_arithmetic(a.kind) && is_datum(b.kind)) {
      const auto* m = table.find(b.label);
      if (m && m->in_memory()) ++expected[{b.label, AccessDirection::Write, e.src}];
    }
  }
  std::map<AccessKey, std::vector<const AccessRecord*>> actual;
  for (const auto& a : s.accesses) actual[{a.datum, a.direction, a.vertex}].push_back(&a);
  for (const auto& [key, n] : expected) {
    auto it = actual.find(key);
    const int have = it == actual.end() ? 0 : static_cast<int>(it->second.size());
    if (have != n)
      out.push_back({"missing-access", std::get<0>(key) + ">" + id(std::get<2>(key)),
                     std::string(direction_name(std::get<1>(key))) + " records: " + std::to_string(have) +
                         ", expected " + std::to_string(n)});
  }
  for (const auto& [key, recs] : actual)
    if (!expected.count(key))
      out.push_back({"unexpected-access", std::get<0>(key), std::to_string(recs.size()) + " extra record(s)"});

  for (const auto& a : s.accesses) {
    const auto* m = table.find(a.datum);
    if (!m || !m->in_memory()) continue;
    if (a.bank != m->bank || a.address != m->address)
      out.push_back({"access-address", a.datum, "record placement differs from the memory table"});
    if (a.port < 0 || a.port >= table.ports_per_bank)
      out.push_back({"port-range", a.datum, "port " + std::to_string(a.port) + " out of range"});
    if (a.start < 0) out.push_back({"access-start", a.datum, "negative start"});
  }

  auto first_of = [&](const std::string& datum, AccessDirection d, std::size_t v) -> const AccessRecord* {
    auto it = actual.find({datum, d, v});
    return it == actual.end() || it->second.empty() ? nullptr : it->second.front();
  };

  // Dependences.
  for (const auto& e : g.edges()) {
    const auto& a = g.vertex(e.src);
    const auto& b = g.vertex(e.dst);
    if (!is_arithmetic(b.kind) && !(is_arithmetic(a.kind) && is_datum(b.kind))) continue;
    const auto* cons = is_arithmetic(b.kind) && op.count(e.dst) ? op.at(e.dst) : nullptr;

    if (is_arithmetic(a.kind) && is_arithmetic(b.kind)) {
      const auto* prod = op.count(e.src) ? op.at(e.src) : nullptr;
      if (prod && cons && prod->finish() > cons->start)
        out.push_back({"dependence", id(e.src) + "->" + id(e.dst), "consumer starts before producer finishes"});
    } else if (is_datum(a.kind) && is_arithmetic(b.kind)) {
      const auto* m = table.find(a.label);
      if (!m || !cons) continue;
      // Producer of this value within the iteration, if any.
      const OperationRecord* prod = nullptr;
      if (a.kind != VertexKind::Delay)
        for (auto p : g.preds(e.src))
          if (is_arithmetic(g.vertex(p).kind) && op.count(p)) prod = op.at(p);
      if (m->in_memory()) {
        const auto* rd = first_of(a.label, AccessDirection::Read, e.dst);
        if (rd && rd->finish() > cons->start)
          out.push_back({"dependence", a.label + "->" + id(e.dst), "operand read finishes after consumer start"});
        if (rd && prod) {
          const auto* wr = first_of(a.label, AccessDirection::Write, prod->vertex);
          if (wr && wr->finish() > rd->start)
            out.push_back({"dependence", a.label + "->" + id(e.dst), "read starts before the value is written"});
        }
      } else if (prod && prod->finish() > cons->start) {
        out.push_back({"dependence", a.label + "->" + id(e.dst), "register value consumed before produced"});
      }
    } else {
      const auto* m = table.find(b.label);
      const auto* prod = op.count(e.src) ? op.at(e.src) : nullptr;
      if (!m || !m->in_memory() || !prod) continue;
      const auto* wr = first_of(b.label, AccessDirection::Write, e.src);
      if (wr && wr->start < prod->finish())
        out.push_back({"dependence", id(e.src) + "->" + b.label, "write starts before producer finishes"});
      // The old value must be read out before it is overwritten.
      if (wr)
        for (const auto& r : s.accesses) {
          if (r.direction != AccessDirection::Read || r.datum != b.label) continue;
          bool old_value = false;
          for (auto p : g.preds(r.vertex)) {
            const auto& pv = g.vertex(p);
            if (!is_datum(pv.kind) || pv.label != b.label) continue;
            const bool produced = pv.kind != VertexKind::Delay &&
                                  std::any_of(g.preds(p).begin(), g.preds(p).end(),
                                              [&](std::size_t q) { return is_arithmetic(g.vertex(q).kind); });
            if (!produced) old_value = true;
          }
          if (old_value && r.finish() > wr->start)
            out.push_back({"war", b.label, "overwritten before read by " + id(r.vertex)});
        }
    }
  }

  // Operator limits and instance exclusivity.
  for (auto rc : {ResourceClass::Mul, ResourceClass::Alu}) {
    std::vector<std::pair<int, int>> iv;
    std::map<int, std::vector<std::pair<int, int>>> per_instance;
    for (const auto& r : s.operations)
      if (r.resource == rc) {
        iv.emplace_back(r.start, r.finish());
        per_instance[r.instance].emplace_back(r.start, r.finish());
      }
    const int peak = detail::peak_overlap(iv);
    if (peak > resources.count(rc))
      out.push_back({"operator-overflow", std::string(resource_name(rc)),
                     std::to_string(peak) + " in flight, " + std::to_string(resources.count(rc)) + " available"});
    for (auto& [inst, list] : per_instance)
      if (detail::peak_overlap(list) > 1)
        out.push_back({"instance-overlap", std::string(resource_name(rc)) + "#" + std::to_string(inst),
                       "operator instance used twice at once"});
  }

  // Port limits, exclusivity and weight classes.
  std::map<int, std::vector<std::pair<int, int>>> per_bank;
  std::map<std::pair<int, int>, std::vector<const AccessRecord*>> per_port;
  for (const auto& a : s.accesses) {
    per_bank[a.bank].emplace_back(a.start, a.finish());
    per_port[{a.bank, a.port}].push_back(&a);
  }
  for (const auto& [bank, list] : per_bank) {
    const int peak = detail::peak_overlap(list);
    if (peak > table.ports_per_bank)
      out.push_back({"port-overflow", "bank" + std::to_string(bank),
                     std::to_string(peak) + " accesses in flight, " + std::to_string(table.ports_per_bank) + " ports"});
  }
  for (auto& [key, list] : per_port) {
    std::sort(list.begin(), list.end(), [](const AccessRecord* a, const AccessRecord* b) { return a->start < b->start; });
    std::optional<int> last;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto* a = list[i];
      if (i > 0 && list[i - 1]->finish() > a->start)
        out.push_back({"port-overlap", "bank" + std::to_string(key.first) + "/port" + std::to_string(key.second),
                       "accesses overlap on one port"});
      const auto w = last && *last + 1 == a->address ? AccessWeight::Seq : AccessWeight::Rand;
      if (a->weight != w || a->duration != (w == AccessWeight::Seq ? cfg.w_seq : cfg.w_rand))
        out.push_back({"weight-class", a->datum, "access charged " + std::string(weight_name(a->weight)) + "/" +
                                                     std::to_string(a->duration) + ", expected " +
                                                     std::string(weight_name(w))});
      last = a->address;
    }
  }

  int latest = 0;
  for (const auto& r : s.operations) latest = std::max(latest, r.finish());
  for (const auto& a : s.accesses) latest = std::max(latest, a.finish());
  if (s.latency != latest)
    out.push_back({"latency", "", "reported " + std::to_string(s.latency) + ", actual " + std::to_string(latest)});
  if (latest > cfg.cadence)
    out.push_back({"deadline", "", "finishes at " + std::to_string(latest) + " > cadence " + std::to_string(cfg.cadence)});
  return out;
}

}  // namespace memhls
