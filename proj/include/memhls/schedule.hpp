#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/mcg.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace memhls {

// Operator classes. add/sub/alu all run on a multifunctional ALU.
enum class ResourceClass { Mul, Alu };

inline constexpr std::string_view resource_name(ResourceClass r) { return r == ResourceClass::Mul ? "mul" : "alu"; }

inline constexpr ResourceClass resource_of(VertexKind k) {
  return k == VertexKind::Mul ? ResourceClass::Mul : ResourceClass::Alu;
}

struct ResourceSet {
  int mul = 1;
  int alu = 1;

  int count(ResourceClass r) const { return r == ResourceClass::Mul ? mul : alu; }
  int& count(ResourceClass r) { return r == ResourceClass::Mul ? mul : alu; }

  friend bool operator==(const ResourceSet&, const ResourceSet&) = default;
};

enum class AccessDirection { Read, Write };

inline constexpr std::string_view direction_name(AccessDirection d) {
  return d == AccessDirection::Read ? "read" : "write";
}

struct OperationRecord {
  std::size_t vertex = 0;
  int start = 0;
  int duration = 0;
  ResourceClass resource = ResourceClass::Alu;
  int instance = 0;

  int finish() const { return start + duration; }

  friend bool operator==(const OperationRecord&, const OperationRecord&) = default;
};

// A read feeds `vertex` (the consumer); a write stores `vertex`'s result.
struct AccessRecord {
  std::string datum;
  AccessDirection direction = AccessDirection::Read;
  std::size_t vertex = 0;
  int start = 0;
  int bank = 0;
  int port = 0;
  AccessWeight weight = AccessWeight::Rand;
  int duration = 0;
  int address = 0;

  int finish() const { return start + duration; }

  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

struct Schedule {
  std::vector<OperationRecord> operations;  // ascending (start, vertex)
  std::vector<AccessRecord> accesses;       // ascending (start, bank, port)
  int latency = 0;
  int bank_conflicts = 0;  // candidates dropped because their bank had no idle port

  const OperationRecord* operation_of(std::size_t vertex) const {
    for (const auto& op : operations)
      if (op.vertex == vertex) return &op;
    return nullptr;
  }

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.operations == b.operations && a.accesses == b.accesses && a.latency == b.latency;
  }
};

// ---------------------------------------------------------------------------
// CSV: cycle,kind,vertex_or_datum,resource,bank,port,weight_class,duration
//
// Operation rows: kind is the vertex kind, resource is "<class>#<instance>".
// Access rows: kind is read/write, vertex_or_datum the datum, and resource the
// consuming (read) or producing (write) vertex id.

inline constexpr std::string_view kScheduleHeader = "cycle,kind,vertex_or_datum,resource,bank,port,weight_class,duration";

inline std::string emit_schedule_csv(const Schedule& s, const Sfg& g) {
  struct Row {
    int cycle;
    int order;
    std::string text;
  };
  std::vector<Row> rows;
  for (const auto& op : s.operations) {
    std::ostringstream os;
    os << op.start << ',' << kind_name(g.vertex(op.vertex).kind) << ',' << g.vertex(op.vertex).id << ','
       << resource_name(op.resource) << '#' << op.instance << ",-1,-1,-," << op.duration;
    rows.push_back({op.start, 1, os.str()});
  }
  for (const auto& a : s.accesses) {
    std::ostringstream os;
    os << a.start << ',' << direction_name(a.direction) << ',' << a.datum << ',' << g.vertex(a.vertex).id << ','
       << a.bank << ',' << a.port << ',' << weight_name(a.weight) << ',' << a.duration;
    rows.push_back({a.start, 0, os.str()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.cycle != b.cycle ? a.cycle < b.cycle : a.order < b.order;
  });
  std::ostringstream out;
  out << kScheduleHeader << '\n';
  for (const auto& r : rows) out << r.text << '\n';
  return out.str();
}

// Re-loads a schedule written by emit_schedule_csv. Addresses come from the
// table; latency is recomputed as the latest finish.
inline Schedule parse_schedule_csv(std::string_view text, const Sfg& g, const MemoryTable& table) {
  Schedule s;
  int line_no = 0;
  std::size_t pos = 0;
  bool header = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kScheduleHeader) throw ParseError("expected schedule header", line_no, 1);
      header = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 8) throw ParseError("expected 8 fields", line_no, 1);
    auto num = [&](const std::string& v, int col) {
      auto n = detail::parse_number<int>(v);
      if (!n) throw ParseError("bad number '" + v + "'", line_no, col);
      return *n;
    };
    const int cycle = num(f[0], 1);
    const int duration = num(f[7], 8);
    if (f[1] == "read" || f[1] == "write") {
      AccessRecord a;
      a.datum = f[2];
      a.direction = f[1] == "read" ? AccessDirection::Read : AccessDirection::Write;
      auto v = g.find(f[3]);
      if (!v) throw ParseError("unknown vertex '" + f[3] + "'", line_no, 4);
      a.vertex = *v;
      a.start = cycle;
      a.bank = num(f[4], 5);
      a.port = num(f[5], 6);
      if (f[6] != "seq" && f[6] != "rand") throw ParseError("bad weight class '" + f[6] + "'", line_no, 7);
      a.weight = f[6] == "seq" ? AccessWeight::Seq : AccessWeight::Rand;
      a.duration = duration;
      const auto* e = table.find(a.datum);
      if (!e) throw ParseError("unknown datum '" + a.datum + "'", line_no, 3);
      a.address = e->address;
      s.accesses.push_back(std::move(a));
    } else {
      OperationRecord op;
      auto v = g.find(f[2]);
      if (!v) throw ParseError("unknown vertex '" + f[2] + "'", line_no, 3);
      op.vertex = *v;
      op.start = cycle;
      op.duration = duration;
      auto hash = f[3].find('#');
      if (hash == std::string::npos) throw ParseError("bad resource '" + f[3] + "'", line_no, 4);
      const auto cls = f[3].substr(0, hash);
      if (cls != "mul" && cls != "alu") throw ParseError("bad resource class '" + cls + "'", line_no, 4);
      op.resource = cls == "mul" ? ResourceClass::Mul : ResourceClass::Alu;
      op.instance = num(f[3].substr(hash + 1), 4);
      s.operations.push_back(op);
    }
  }
  if (!header) throw ParseError("missing schedule header");
  for (const auto& op : s.operations) s.latency = std::max(s.latency, op.finish());
  for (const auto& a : s.accesses) s.latency = std::max(s.latency, a.finish());
  return s;
}

}  // namespace memhls
