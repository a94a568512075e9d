#pragma once

// Signal Flow Graph IR: a polar directed graph of arithmetic, data and delay
// vertices. Delay (z^-1) vertices carry values across iterations; edges that
// leave a delay vertex are not intra-iteration precedences.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memhls/error.hpp"

namespace memhls {

enum class VertexKind { Input, Output, Constant, Add, Sub, Mul, Alu, Data, Delay, Source, Sink };

inline constexpr std::string_view kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::Input: return "input";
    case VertexKind::Output: return "output";
    case VertexKind::Constant: return "constant";
    case VertexKind::Add: return "add";
    case VertexKind::Sub: return "sub";
    case VertexKind::Mul: return "mul";
    case VertexKind::Alu: return "alu";
    case VertexKind::Data: return "data";
    case VertexKind::Delay: return "delay";
    case VertexKind::Source: return "source";
    case VertexKind::Sink: return "sink";
  }
  return "?";
}

inline std::optional<VertexKind> parse_kind(std::string_view s) {
  static constexpr VertexKind all[] = {
      VertexKind::Input, VertexKind::Output, VertexKind::Constant, VertexKind::Add,
      VertexKind::Sub,   VertexKind::Mul,    VertexKind::Alu,      VertexKind::Data,
      VertexKind::Delay, VertexKind::Source, VertexKind::Sink};
  for (auto k : all)
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

inline constexpr bool is_arithmetic(VertexKind k) {
  return k == VertexKind::Add || k == VertexKind::Sub || k == VertexKind::Mul ||
         k == VertexKind::Alu;
}

// Kinds that become memory-table entries.
inline constexpr bool is_datum(VertexKind k) {
  return k == VertexKind::Data || k == VertexKind::Constant || k == VertexKind::Delay;
}

inline constexpr bool is_terminal(VertexKind k) {
  return k == VertexKind::Source || k == VertexKind::Sink;
}

struct Vertex {
  std::string id;
  VertexKind kind = VertexKind::Data;
  std::string label;  // datum name; empty for non-datum kinds
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
};

class Sfg {
 public:
  std::size_t add_vertex(std::string id, VertexKind kind, std::string label = {}) {
    if (index_.count(id)) throw Error("duplicate vertex id '" + id + "'");
    if (label.empty() && is_datum(kind)) label = id;
    const std::size_t idx = vertices_.size();
    index_.emplace(id, idx);
    vertices_.push_back(Vertex{std::move(id), kind, std::move(label)});
    preds_.emplace_back();
    succs_.emplace_back();
    if (kind == VertexKind::Source && !source_) source_ = idx;
    if (kind == VertexKind::Sink && !sink_) sink_ = idx;
    return idx;
  }

  void add_edge(std::size_t src, std::size_t dst) {
    if (src >= vertices_.size() || dst >= vertices_.size()) throw Error("edge endpoint out of range");
    edges_.push_back(Edge{src, dst});
    succs_[src].push_back(dst);
    preds_[dst].push_back(src);
  }

  void add_edge(std::string_view src, std::string_view dst) { add_edge(at(src), at(dst)); }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t at(std::string_view id) const {
    auto idx = find(id);
    if (!idx) throw Error("unknown vertex id '" + std::string(id) + "'");
    return *idx;
  }

  // Adds a source feeding every vertex without predecessors and a sink fed by
  // every vertex without successors, unless the graph already has them.
  void close_polar() {
    if (source_ && sink_) return;
    const std::size_t n = vertices_.size();
    if (!source_) {
      const auto src = add_vertex(unique_id("v0"), VertexKind::Source);
      for (std::size_t v = 0; v < n; ++v)
        if (preds_[v].empty() && !is_terminal(vertices_[v].kind)) add_edge(src, v);
      synthesized_ = true;
    }
    if (!sink_) {
      const auto snk = add_vertex(unique_id("vn"), VertexKind::Sink);
      for (std::size_t v = 0; v < n; ++v)
        if (succs_[v].empty() && !is_terminal(vertices_[v].kind)) add_edge(v, snk);
      synthesized_ = true;
    }
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t v) const { return vertices_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& preds(std::size_t v) const { return preds_[v]; }
  const std::vector<std::size_t>& succs(std::size_t v) const { return succs_[v]; }
  std::size_t size() const { return vertices_.size(); }
  std::optional<std::size_t> source() const { return source_; }
  std::optional<std::size_t> sink() const { return sink_; }
  bool terminals_synthesized() const { return synthesized_; }

  // Intra-iteration precedence: edges not leaving a delay vertex.
  bool is_precedence(const Edge& e) const { return vertices_[e.src].kind != VertexKind::Delay; }

  std::size_t count(VertexKind k) const {
    return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(),
                                                  [k](const Vertex& v) { return v.kind == k; }));
  }

  std::size_t arithmetic_count() const {
    return static_cast<std::size_t>(std::count_if(
        vertices_.begin(), vertices_.end(), [](const Vertex& v) { return is_arithmetic(v.kind); }));
  }

 private:
  std::string unique_id(std::string base) const {
    std::string id = base;
    for (int i = 0; index_.count(id); ++i) id = base + "_" + std::to_string(i);
    return id;
  }

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::size_t> source_;
  std::optional<std::size_t> sink_;
  bool synthesized_ = false;
};

// Topological order over precedence edges (edges leaving delays removed).
// Returns nullopt when those edges contain a cycle.
inline std::optional<std::vector<std::size_t>> precedence_order(const Sfg& g) {
  const std::size_t n = g.size();
  std::vector<int> indeg(n, 0);
  for (const auto& e : g.edges())
    if (g.is_precedence(e)) ++indeg[e.dst];
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) order.push_back(v);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto v = order[head];
    if (g.vertex(v).kind == VertexKind::Delay) continue;
    for (auto s : g.succs(v))
      if (--indeg[s] == 0) order.push_back(s);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

inline std::vector<Diagnostic> validate_sfg(const Sfg& g) {
  std::vector<Diagnostic> out;
  const std::size_t n = g.size();

  std::vector<std::size_t> sources, sinks, loose_heads, loose_tails;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& vx = g.vertex(v);
    if (vx.kind == VertexKind::Source) sources.push_back(v);
    if (vx.kind == VertexKind::Sink) sinks.push_back(v);
    if (vx.kind != VertexKind::Source && g.preds(v).empty()) loose_heads.push_back(v);
    if (vx.kind != VertexKind::Sink && g.succs(v).empty()) loose_tails.push_back(v);
  }
  if (sources.size() != 1 || !loose_heads.empty()) {
    std::string who;
    for (auto v : loose_heads) who += (who.empty() ? "" : ",") + g.vertex(v).id;
    out.push_back({"polarity", who,
                   std::to_string(sources.size()) + " source vertex(es) and " +
                       std::to_string(loose_heads.size()) + " other vertex(es) without predecessors"});
  }
  if (sinks.size() != 1 || !loose_tails.empty()) {
    std::string who;
    for (auto v : loose_tails) who += (who.empty() ? "" : ",") + g.vertex(v).id;
    out.push_back({"polarity", who,
                   std::to_string(sinks.size()) + " sink vertex(es) and " +
                       std::to_string(loose_tails.size()) + " other vertex(es) without successors"});
  }

  for (std::size_t v = 0; v < n; ++v) {
    const auto& vx = g.vertex(v);
    if (vx.kind == VertexKind::Source && !g.preds(v).empty())
      out.push_back({"polarity", vx.id, "source has predecessors"});
    if (vx.kind == VertexKind::Sink && !g.succs(v).empty())
      out.push_back({"polarity", vx.id, "sink has successors"});
    if (is_arithmetic(vx.kind)) {
      auto real_preds = std::count_if(g.preds(v).begin(), g.preds(v).end(), [&](std::size_t p) {
        return g.vertex(p).kind != VertexKind::Source;
      });
      auto real_succs = std::count_if(g.succs(v).begin(), g.succs(v).end(), [&](std::size_t s) {
        return g.vertex(s).kind != VertexKind::Sink;
      });
      if (real_preds < 1 || real_succs < 1)
        out.push_back({"arity", vx.id, "arithmetic vertex needs >=1 operand and >=1 consumer"});
    }
    if (vx.kind == VertexKind::Delay) {
      auto real_preds = std::count_if(g.preds(v).begin(), g.preds(v).end(), [&](std::size_t p) {
        return g.vertex(p).kind != VertexKind::Source;
      });
      if (real_preds != 1)
        out.push_back({"delay-arity", vx.id,
                       "delay vertex has " + std::to_string(real_preds) + " predecessors, expected 1"});
    }
  }

  if (!precedence_order(g)) out.push_back({"cycle", "", "cycle not broken by a delay vertex"});

  if (sources.size() == 1 && sinks.size() == 1) {
    auto reach = [&](std::size_t start, bool forward) {
      std::vector<char> seen(n, 0);
      std::vector<std::size_t> stack{start};
      seen[start] = 1;
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : forward ? g.succs(v) : g.preds(v))
          if (!seen[w]) {
            seen[w] = 1;
            stack.push_back(w);
          }
      }
      return seen;
    };
    const auto from_source = reach(sources.front(), true);
    const auto to_sink = reach(sinks.front(), false);
    for (std::size_t v = 0; v < n; ++v)
      if (!from_source[v] || !to_sink[v])
        out.push_back({"unreachable", g.vertex(v).id, "vertex not on a source-to-sink path"});
  }
  return out;
}

}  // namespace memhls
