#pragma once

// Memory table: where every datum of an SFG lives (register or bank/address).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/sfg.hpp"
#include "memhls/timing.hpp"

namespace memhls {

enum class DataClass { Variable, Constant, LoopBack, Delay };
enum class Implementation { Register, Memory };

inline constexpr std::string_view class_name(DataClass c) {
  switch (c) {
    case DataClass::Variable: return "Variable";
    case DataClass::Constant: return "Constant";
    case DataClass::LoopBack: return "LoopBack";
    case DataClass::Delay: return "Delay";
  }
  return "?";
}

inline constexpr std::string_view implementation_name(Implementation i) {
  return i == Implementation::Register ? "Register" : "Memory";
}

struct MappingEntry {
  std::string name;
  DataClass cls = DataClass::Variable;
  Implementation implementation = Implementation::Memory;
  int bank = 0;     // -1 iff Register
  int address = 0;  // -1 iff Register
  double initial_value = 0.0;
  std::string shared_with;  // declared dynamic sharing of (bank, address)

  bool in_memory() const { return implementation == Implementation::Memory; }

  friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

struct MemoryTable {
  std::vector<MappingEntry> entries;
  int bank_count = 1;
  int ports_per_bank = 1;

  const MappingEntry* find(std::string_view name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }

  MappingEntry* find(std::string_view name) {
    for (auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }

  friend bool operator==(const MemoryTable&, const MemoryTable&) = default;
};

// ---------------------------------------------------------------------------
// Datum structure of an SFG

inline std::set<std::string> data_labels(const Sfg& g) {
  std::set<std::string> out;
  for (const auto& v : g.vertices())
    if (v.kind == VertexKind::Data) out.insert(v.label);
  return out;
}

// A delay vertex labelled L fed by an operation, paired with a data vertex L:
// the value is written this iteration and read back next iteration.
inline bool is_loopback_delay(const Sfg& g, std::size_t v, const std::set<std::string>& data) {
  const auto& vx = g.vertex(v);
  if (vx.kind != VertexKind::Delay || !data.count(vx.label)) return false;
  return std::any_of(g.preds(v).begin(), g.preds(v).end(),
                     [&](std::size_t p) { return is_arithmetic(g.vertex(p).kind); });
}

inline bool is_loopback_delay(const Sfg& g, std::size_t v) { return is_loopback_delay(g, v, data_labels(g)); }

// Datum vertices whose value is produced by an operation within the iteration.
inline bool is_produced_datum(const Sfg& g, std::size_t v) {
  if (!is_datum(g.vertex(v).kind)) return false;
  for (auto p : g.preds(v)) {
    const auto k = g.vertex(p).kind;
    if (is_arithmetic(k) || k == VertexKind::Input) return true;
  }
  return false;
}

// Label -> datum vertex indices, in declaration order.
inline std::map<std::string, std::vector<std::size_t>> datum_vertices(const Sfg& g) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (is_datum(g.vertex(v).kind)) out[g.vertex(v).label].push_back(v);
  return out;
}

// Ageing vectors: a stream-fed data vertex followed by its chain of delays
// x(0) -> z^-1 x(1) -> ... Each is returned as labels, newest sample first.
inline std::vector<std::vector<std::string>> ageing_vectors(const Sfg& g) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& vx = g.vertex(v);
    if (vx.kind != VertexKind::Data) continue;
    const bool stream_fed = std::all_of(g.preds(v).begin(), g.preds(v).end(), [&](std::size_t p) {
      return g.vertex(p).kind == VertexKind::Source || g.vertex(p).kind == VertexKind::Input;
    });
    if (!stream_fed) continue;
    std::vector<std::string> vec{vx.label};
    std::size_t cur = v;
    for (;;) {
      std::optional<std::size_t> next;
      for (auto s : g.succs(cur))
        if (g.vertex(s).kind == VertexKind::Delay && g.preds(s).size() == 1) next = s;
      if (!next) break;
      cur = *next;
      vec.push_back(g.vertex(cur).label);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

// One entry per datum label. Memory, bank 0, dense addresses in declaration
// order. The head of an ageing vector is a Variable, its delayed taps Delay.
inline MemoryTable extract_table(const Sfg& g) {
  MemoryTable t;
  const auto data = data_labels(g);
  const auto by_label = datum_vertices(g);
  std::set<std::string> seen;
  int next_address = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& vx = g.vertex(v);
    if (!is_datum(vx.kind) || seen.count(vx.label)) continue;
    seen.insert(vx.label);
    const auto& group = by_label.at(vx.label);
    bool loopback = false;
    if (group.size() > 1) {
      // Only a data vertex and its loopback delay may share a label.
      std::size_t plain = 0, loop = 0;
      for (auto u : group) {
        if (g.vertex(u).kind == VertexKind::Data) ++plain;
        else if (is_loopback_delay(g, u, data)) ++loop;
      }
      if (group.size() != 2 || plain != 1 || loop != 1) throw Error("duplicate datum label '" + vx.label + "'");
      loopback = true;
    }
    MappingEntry e;
    e.name = vx.label;
    if (loopback || is_loopback_delay(g, v, data))
      e.cls = DataClass::LoopBack;
    else if (vx.kind == VertexKind::Constant)
      e.cls = DataClass::Constant;
    else if (vx.kind == VertexKind::Delay)
      e.cls = DataClass::Delay;
    else
      e.cls = DataClass::Variable;
    e.implementation = Implementation::Memory;
    e.bank = 0;
    e.address = next_address++;
    t.entries.push_back(std::move(e));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Lifetimes and placement

// ASAP-based lifetime of every datum: from its producer's finish (0 if it
// exists at iteration start) to its last consumer's finish.
inline std::map<std::string, int> datum_lifetimes(const Sfg& g, const TimingConfig& cfg) {
  TimingConfig loose = cfg;
  loose.cadence = std::numeric_limits<int>::max() / 4;
  const auto ta = timing_analysis(g, loose);
  const auto data = data_labels(g);
  std::map<std::string, int> birth, death;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& vx = g.vertex(v);
    if (!is_datum(vx.kind)) continue;
    if (is_loopback_delay(g, v, data)) continue;  // write side; the read side owns the lifetime
    int b = 0;
    for (auto p : g.preds(v))
      if (g.vertex(p).kind != VertexKind::Delay)
        b = std::max(b, ta.asap[p] + cfg.latency_of(g.vertex(p).kind));
    if (vx.kind == VertexKind::Delay) b = 0;
    int d = b;
    for (auto s : g.succs(v))
      if (is_arithmetic(g.vertex(s).kind)) d = std::max(d, ta.asap[s] + cfg.latency_of(g.vertex(s).kind));
    auto [bi, inserted] = birth.emplace(vx.label, b);
    if (!inserted) bi->second = std::min(bi->second, b);
    death[vx.label] = std::max(death[vx.label], d);
  }
  std::map<std::string, int> out;
  for (const auto& [name, b] : birth) out[name] = death[name] - b;
  return out;
}

// Data with lifetime < threshold go to registers; the rest are dealt across
// `banks` in blocks of `interleave_k` entries (map2_k style), addresses dense
// per bank in block order. Data without a known lifetime stay in memory.
inline MemoryTable auto_place(const MemoryTable& table, const std::map<std::string, int>& lifetimes,
                              int threshold, int banks, int interleave_k) {
  if (banks < 1) throw Error("auto_place: banks must be >= 1");
  if (interleave_k < 1) throw Error("auto_place: interleave block must be >= 1");
  MemoryTable out = table;
  out.bank_count = banks;
  std::vector<int> next_address(static_cast<std::size_t>(banks), 0);
  int memory_index = 0;
  for (auto& e : out.entries) {
    e.shared_with.clear();
    auto it = lifetimes.find(e.name);
    if (it != lifetimes.end() && it->second < threshold) {
      e.implementation = Implementation::Register;
      e.bank = -1;
      e.address = -1;
      continue;
    }
    e.implementation = Implementation::Memory;
    e.bank = (memory_index / interleave_k) % banks;
    e.address = next_address[static_cast<std::size_t>(e.bank)]++;
    ++memory_index;
  }
  return out;
}

// Base name of an indexed datum: "h(3)" -> "h"; scalars return nullopt.
inline std::optional<std::string> array_base(std::string_view name) {
  auto paren = name.find('(');
  if (paren == std::string_view::npos || paren == 0) return std::nullopt;
  return std::string(name.substr(0, paren));
}

// Arrays go to the bank named in `array_bank` (consecutive addresses in
// declaration order); scalars and unlisted arrays go to registers.
inline MemoryTable place_arrays(const MemoryTable& table, const std::map<std::string, int>& array_bank,
                                int banks) {
  MemoryTable out = table;
  out.bank_count = banks;
  std::vector<int> next_address(static_cast<std::size_t>(banks), 0);
  for (auto& e : out.entries) {
    e.shared_with.clear();
    auto base = array_base(e.name);
    auto it = base ? array_bank.find(*base) : array_bank.end();
    if (it == array_bank.end()) {
      e.implementation = Implementation::Register;
      e.bank = e.address = -1;
      continue;
    }
    if (it->second < 0 || it->second >= banks) throw Error("place_arrays: bank out of range for " + *base);
    e.implementation = Implementation::Memory;
    e.bank = it->second;
    e.address = next_address[static_cast<std::size_t>(e.bank)]++;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<Diagnostic> validate_mapping(const MemoryTable& t, const Sfg& g) {
  std::vector<Diagnostic> out;
  if (t.ports_per_bank < 1) out.push_back({"ports", "", "ports_per_bank must be >= 1"});
  if (t.bank_count < 1) out.push_back({"bank-range", "", "bank_count must be >= 1"});

  std::map<std::string, int> count;
  for (const auto& e : t.entries) ++count[e.name];
  for (const auto& [label, vs] : datum_vertices(g)) {
    (void)vs;
    auto it = count.find(label);
    if (it == count.end())
      out.push_back({"unmapped", label, "unmapped datum " + label});
    else if (it->second > 1)
      out.push_back({"duplicate-entry", label, "datum mapped " + std::to_string(it->second) + " times"});
  }

  std::map<std::pair<int, int>, std::vector<const MappingEntry*>> slots;
  for (const auto& e : t.entries) {
    if (e.implementation == Implementation::Register) {
      if (e.bank != -1 || e.address != -1)
        out.push_back({"register-sentinel", e.name, "Register entry must have bank = address = -1"});
      continue;
    }
    if (e.bank < 0 || e.address < 0) {
      out.push_back({"register-sentinel", e.name, "Memory entry needs bank >= 0 and address >= 0"});
      continue;
    }
    if (e.bank >= t.bank_count)
      out.push_back({"bank-range", e.name,
                     "bank " + std::to_string(e.bank) + " outside [0," + std::to_string(t.bank_count) + ")"});
    slots[{e.bank, e.address}].push_back(&e);
  }
  for (const auto& [slot, es] : slots) {
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        const bool declared = es[i]->shared_with == es[j]->name || es[j]->shared_with == es[i]->name;
        if (!declared)
          out.push_back({"collision", es[i]->name + "," + es[j]->name,
                         "address collision at bank " + std::to_string(slot.first) + " address " +
                             std::to_string(slot.second)});
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV format
//
//   # banks=2 ports=1                      (optional directive)
//   Name,Class,Implementation,Bank,Address,InitialValue
//   adapt,Variable,Register,-1,-1,0
//   h(0),LoopBack,Memory,0,1,0[,shared-with=<name>]

inline constexpr std::string_view kMappingHeader = "Name,Class,Implementation,Bank,Address,InitialValue";

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline MemoryTable parse_mapping(std::string_view text) {
  MemoryTable t;
  std::optional<int> declared_banks;
  bool header_seen = false;
  int line_no = 0;
  std::size_t pos = 0;
  std::map<std::pair<int, int>, std::size_t> slots;
  std::vector<int> entry_lines;

  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream is{std::string(line.substr(1))};
      std::string word;
      while (is >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        auto key = word.substr(0, eq);
        auto val = detail::parse_number<int>(std::string_view(word).substr(eq + 1));
        if (key == "banks" && val) declared_banks = *val;
        if (key == "ports" && val) t.ports_per_bank = *val;
      }
      continue;
    }
    if (!header_seen) {
      if (line != kMappingHeader)
        throw ParseError("expected header '" + std::string(kMappingHeader) + "'", line_no, 1);
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 6 && f.size() != 7) throw ParseError("expected 6 fields", line_no, 1);
    MappingEntry e;
    e.name = f[0];
    if (e.name.empty()) throw ParseError("empty name", line_no, 1);

    if (f[1] == "Variable") e.cls = DataClass::Variable;
    else if (f[1] == "Constant") e.cls = DataClass::Constant;
    else if (f[1] == "LoopBack") e.cls = DataClass::LoopBack;
    else if (f[1] == "Delay") e.cls = DataClass::Delay;
    else throw ParseError("bad class token '" + f[1] + "'", line_no, 2);

    if (f[2] == "Register") e.implementation = Implementation::Register;
    else if (f[2] == "Memory") e.implementation = Implementation::Memory;
    else throw ParseError("bad implementation token '" + f[2] + "'", line_no, 3);

    auto bank = detail::parse_number<int>(f[3]);
    auto addr = detail::parse_number<int>(f[4]);
    auto init = detail::parse_number<double>(f[5]);
    if (!bank) throw ParseError("bad bank '" + f[3] + "'", line_no, 4);
    if (!addr) throw ParseError("bad address '" + f[4] + "'", line_no, 5);
    if (!init) throw ParseError("bad initial value '" + f[5] + "'", line_no, 6);
    e.bank = *bank;
    e.address = *addr;
    e.initial_value = *init;
    if (f.size() == 7) {
      constexpr std::string_view prefix = "shared-with=";
      if (f[6].rfind(prefix, 0) != 0) throw ParseError("expected shared-with=<name>", line_no, 7);
      e.shared_with = f[6].substr(prefix.size());
    }

    if (e.implementation == Implementation::Register && (e.bank != -1 || e.address != -1))
      throw ParseError("Register row must have bank = address = -1", line_no, 4);
    if (e.implementation == Implementation::Memory && (e.bank < 0 || e.address < 0))
      throw ParseError("Memory row needs bank >= 0 and address >= 0", line_no, 4);
    if (t.find(e.name)) throw ParseError("duplicate name '" + e.name + "'", line_no, 1);

    if (e.in_memory()) {
      auto [it, fresh] = slots.emplace(std::pair{e.bank, e.address}, t.entries.size());
      if (!fresh) {
        const auto& other = t.entries[it->second];
        if (other.shared_with != e.name && e.shared_with != other.name)
          throw ParseError("address collision with '" + other.name + "' at bank " + std::to_string(e.bank) +
                               " address " + std::to_string(e.address),
                           line_no, 5);
      }
    }
    t.entries.push_back(std::move(e));
  }
  if (!header_seen) throw ParseError("missing header '" + std::string(kMappingHeader) + "'");

  int max_bank = -1;
  for (const auto& e : t.entries) max_bank = std::max(max_bank, e.bank);
  t.bank_count = std::max(declared_banks.value_or(1), max_bank + 1);
  if (declared_banks && *declared_banks <= max_bank)
    throw ParseError("bank " + std::to_string(max_bank) + " outside declared banks=" + std::to_string(*declared_banks));
  if (t.ports_per_bank < 1) throw ParseError("ports must be >= 1");
  return t;
}

inline std::string emit_mapping(const MemoryTable& t) {
  std::ostringstream os;
  os << "# banks=" << t.bank_count << " ports=" << t.ports_per_bank << '\n';
  os << kMappingHeader << '\n';
  for (const auto& e : t.entries) {
    os << e.name << ',' << class_name(e.cls) << ',' << implementation_name(e.implementation) << ',' << e.bank
       << ',' << e.address << ',' << detail::format_number(e.initial_value);
    if (!e.shared_with.empty()) os << ",shared-with=" << e.shared_with;
    os << '\n';
  }
  return os.str();
}

}  // namespace memhls
