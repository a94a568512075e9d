#pragma once

// Line-oriented SFG text format:
//
//   # comment
//   node <id> <kind> [label=<name>]
//   edge <src-id> <dst-id>
//
// Ids and labels match [A-Za-z0-9_()]+. Source/sink vertices may be given
// explicitly (kinds `source`/`sink`); otherwise they are synthesized.

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memhls/error.hpp"
#include "memhls/sfg.hpp"

namespace memhls {

namespace detail {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

inline std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#')
      ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '(' || c == ')';
}

// Returns the 0-based offset of the first bad character, or npos.
inline std::size_t bad_name_char(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!is_name_char(s[i])) return i;
  return std::string_view::npos;
}

}  // namespace detail

inline Sfg parse_sfg(std::string_view text) {
  struct PendingEdge {
    std::string src, dst;
    int line, src_col, dst_col;
  };

  Sfg g;
  std::vector<PendingEdge> pending;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto toks = detail::split_tokens(line);
    if (toks.empty()) continue;

    auto check_name = [&](const detail::Token& t) {
      if (t.text.empty()) throw ParseError("empty name", line_no, t.column);
      auto bad = detail::bad_name_char(t.text);
      if (bad != std::string_view::npos)
        throw ParseError("invalid character in name '" + std::string(t.text) + "'", line_no,
                         t.column + static_cast<int>(bad));
    };

    if (toks[0].text == "node") {
      if (toks.size() < 3 || toks.size() > 4)
        throw ParseError("expected: node <id> <kind> [label=<name>]", line_no, toks[0].column);
      check_name(toks[1]);
      auto kind = parse_kind(toks[2].text);
      if (!kind) throw ParseError("unknown kind '" + std::string(toks[2].text) + "'", line_no, toks[2].column);
      std::string label;
      if (toks.size() == 4) {
        constexpr std::string_view prefix = "label=";
        if (toks[3].text.substr(0, prefix.size()) != prefix)
          throw ParseError("expected label=<name>", line_no, toks[3].column);
        detail::Token lt{toks[3].text.substr(prefix.size()), toks[3].column + static_cast<int>(prefix.size())};
        check_name(lt);
        label = std::string(lt.text);
      }
      const std::string id(toks[1].text);
      if (g.find(id)) throw ParseError("duplicate id '" + id + "'", line_no, toks[1].column);
      if (*kind == VertexKind::Source && g.source())
        throw ParseError("polarity violation: second source '" + id + "'", line_no, toks[1].column);
      if (*kind == VertexKind::Sink && g.sink())
        throw ParseError("polarity violation: second sink '" + id + "'", line_no, toks[1].column);
      g.add_vertex(id, *kind, label);
    } else if (toks[0].text == "edge") {
      if (toks.size() != 3) throw ParseError("expected: edge <src-id> <dst-id>", line_no, toks[0].column);
      check_name(toks[1]);
      check_name(toks[2]);
      pending.push_back({std::string(toks[1].text), std::string(toks[2].text), line_no, toks[1].column,
                         toks[2].column});
    } else {
      throw ParseError("unknown record '" + std::string(toks[0].text) + "'", line_no, toks[0].column);
    }
  }

  for (const auto& e : pending) {
    auto s = g.find(e.src);
    if (!s) throw ParseError("dangling edge endpoint '" + e.src + "'", e.line, e.src_col);
    auto d = g.find(e.dst);
    if (!d) throw ParseError("dangling edge endpoint '" + e.dst + "'", e.line, e.dst_col);
    g.add_edge(*s, *d);
  }

  g.close_polar();
  auto diags = validate_sfg(g);
  if (!diags.empty()) throw ValidationError(std::move(diags));
  return g;
}

inline std::string emit_sfg(const Sfg& g) {
  std::ostringstream os;
  const bool skip_terminals = g.terminals_synthesized();
  for (const auto& v : g.vertices()) {
    if (skip_terminals && is_terminal(v.kind)) continue;
    os << "node " << v.id << ' ' << kind_name(v.kind);
    if (is_datum(v.kind)) os << " label=" << v.label;
    os << '\n';
  }
  for (const auto& e : g.edges()) {
    if (skip_terminals && (is_terminal(g.vertex(e.src).kind) || is_terminal(g.vertex(e.dst).kind)))
      continue;
    os << "edge " << g.vertex(e.src).id << ' ' << g.vertex(e.dst).id << '\n';
  }
  return os.str();
}

}  // namespace memhls
