#pragma once

// Memory Constraint Graph of one bank: a complete directed graph over the
// bank's memory-resident data where an edge a->b weighs W_seq when b sits at
// the address right after a and W_rand otherwise. Only the address map is
// stored; edge weights follow from the adjacency rule.
//
// Port tokens (fictive access operators) live in PortState, one per port.

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/timing.hpp"

namespace memhls {

enum class AccessWeight { Seq, Rand };

inline constexpr std::string_view weight_name(AccessWeight w) { return w == AccessWeight::Seq ? "seq" : "rand"; }

inline int access_cost(AccessWeight w, const TimingConfig& cfg) {
  return w == AccessWeight::Seq ? cfg.w_seq : cfg.w_rand;
}

// Sequential iff `to` is the address right after `from`.
inline constexpr AccessWeight weight_between(std::optional<int> from_address, int to_address) {
  return from_address && *from_address + 1 == to_address ? AccessWeight::Seq : AccessWeight::Rand;
}

class Mcg {
 public:
  struct Node {
    std::string name;
    int address;
  };

  Mcg() = default;
  Mcg(int bank, std::vector<Node> nodes) : bank_(bank), nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) {
      return a.address != b.address ? a.address < b.address : a.name < b.name;
    });
    for (const auto& n : nodes_) address_.emplace(n.name, n.address);
  }

  int bank() const { return bank_; }
  const std::vector<Node>& nodes() const { return nodes_; }  // ascending address
  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return nodes_.size() * (nodes_.size() ? nodes_.size() - 1 : 0); }
  bool contains(std::string_view name) const { return address_.count(std::string(name)) > 0; }

  int address_of(std::string_view name) const {
    auto it = address_.find(std::string(name));
    if (it == address_.end()) throw Error("datum '" + std::string(name) + "' not in bank " + std::to_string(bank_));
    return it->second;
  }

  AccessWeight weight(std::string_view from, std::string_view to) const {
    return weight_between(address_of(from), address_of(to));
  }

 private:
  int bank_ = 0;
  std::vector<Node> nodes_;
  std::map<std::string, int, std::less<>> address_;
};

inline Mcg build_mcg(const MemoryTable& table, int bank) {
  std::vector<Mcg::Node> nodes;
  for (const auto& e : table.entries)
    if (e.in_memory() && e.bank == bank) nodes.push_back({e.name, e.address});
  return Mcg(bank, std::move(nodes));
}

inline std::vector<Mcg> build_all_mcgs(const MemoryTable& table) {
  std::vector<Mcg> out;
  for (int b = 0; b < table.bank_count; ++b) out.push_back(build_mcg(table, b));
  return out;
}

// Weight class of accessing `to` right after `from` on the same port; a
// port's first access (no `from`) is random.
inline AccessWeight access_weight(const Mcg& mcg, std::optional<std::string_view> from, std::string_view to) {
  const int to_addr = mcg.address_of(to);
  if (!from) return AccessWeight::Rand;
  return weight_between(mcg.address_of(*from), to_addr);
}

// Longest run of consecutive addresses among `pending` (a burst); ties go to
// the run starting at the lowest address.
inline std::vector<std::string> fastest_sequence(const Mcg& mcg, const std::set<std::string>& pending) {
  std::vector<std::pair<int, std::string>> items;
  for (const auto& name : pending) items.emplace_back(mcg.address_of(name), name);
  std::sort(items.begin(), items.end());
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i + 1;
    while (j < items.size() && items[j].first == items[j - 1].first + 1) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j;
  }
  std::vector<std::string> out;
  for (std::size_t k = best_start; k < best_start + best_len; ++k) out.push_back(items[k].second);
  return out;
}

// ---------------------------------------------------------------------------
// Port tokens

struct Port {
  int busy_until = 0;
  std::optional<int> last_address;
};

struct PortState {
  std::vector<Port> ports;

  explicit PortState(int ports_per_bank = 1) : ports(static_cast<std::size_t>(ports_per_bank)) {}

  std::size_t token_count() const { return ports.size(); }

  // First idle port at `cycle`, preferring one whose last access makes
  // `address` sequential.
  std::optional<std::size_t> idle_port(int cycle, std::optional<int> address = std::nullopt) const {
    std::optional<std::size_t> first;
    for (std::size_t p = 0; p < ports.size(); ++p) {
      if (ports[p].busy_until > cycle) continue;
      if (address && weight_between(ports[p].last_address, *address) == AccessWeight::Seq) return p;
      if (!first) first = p;
    }
    return first;
  }
};

inline bool port_accessible(const PortState& state, int cycle) { return state.idle_port(cycle).has_value(); }

struct AccessGrant {
  int start;
  int finish;
  AccessWeight weight;
};

// Occupies `port` from `cycle` for w_seq or w_rand cycles depending on the
// port's previous address.
inline AccessGrant begin_access(PortState& state, std::size_t port, int address, int cycle, const TimingConfig& cfg) {
  if (port >= state.ports.size()) throw Error("begin_access: no such port");
  auto& p = state.ports[port];
  if (p.busy_until > cycle)
    throw Error("begin_access: port " + std::to_string(port) + " busy until " + std::to_string(p.busy_until));
  const auto w = weight_between(p.last_address, address);
  const int finish = cycle + access_cost(w, cfg);
  p.busy_until = finish;
  p.last_address = address;
  return {cycle, finish, w};
}

// ---------------------------------------------------------------------------
// Debug dump

inline void write_mcg_dot(std::ostream& os, const Mcg& mcg, std::size_t max_random_edges_nodes = 12) {
  os << "digraph mcg_bank" << mcg.bank() << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box, fontname=Courier];\n";
  for (const auto& n : mcg.nodes()) os << "  \"" << n.name << "\" [label=\"" << n.name << "\\n@" << n.address << "\"];\n";
  const auto& nodes = mcg.nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (weight_between(nodes[i].address, nodes[i + 1].address) == AccessWeight::Seq)
      os << "  \"" << nodes[i].name << "\" -> \"" << nodes[i + 1].name << "\" [style=dotted, label=\"Wseq\"];\n";
  // W_rand edges only for small banks; the graph is complete.
  if (mcg.size() <= max_random_edges_nodes)
    for (const auto& a : nodes)
      for (const auto& b : nodes)
        if (a.name != b.name && weight_between(a.address, b.address) == AccessWeight::Rand)
          os << "  \"" << a.name << "\" -> \"" << b.name << "\" [color=gray];\n";
  os << "}\n";
}

}  // namespace memhls
