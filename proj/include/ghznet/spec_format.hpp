#pragma once

// Network specification files.
//
//   # comment (anywhere on a line)
//   agents N                 first non-comment line, N >= 1
//   edge i j [w]             EPR pair between agents i and j, optional weight w >= 0
//   hyper i j k ...          GHZ-form state shared by the listed agents (>= 2)
//
// A file uses `edge` lines or `hyper` lines, never both.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ghznet/errors.hpp"
#include "ghznet/topology.hpp"

namespace ghznet {

struct NetworkSpec {
  enum class Mode { epr_graph, hypergraph };

  struct EdgeLine {
    int u = 0;  // u < v
    int v = 0;
    std::optional<double> weight;

    friend bool operator==(const EdgeLine&, const EdgeLine&) = default;
  };

  int agents = 0;
  Mode mode = Mode::epr_graph;
  std::vector<EdgeLine> edges;
  std::vector<std::vector<int>> hyperedges;  // members ascending

  EprGraph graph() const {
    if (mode != Mode::epr_graph) throw InvalidArgument("spec declares hyperedges, not EPR pairs");
    EprGraph g(agents);
    for (const auto& e : edges) g.add_edge(AgentId{e.u}, AgentId{e.v}, e.weight);
    return g;
  }

  // EPR-graph specs read as hypergraphs of 2-element hyperedges.
  EntangledHypergraph hypergraph() const {
    if (mode == Mode::hypergraph) return EntangledHypergraph(agents, hyperedges);
    std::vector<std::vector<int>> pairs;
    for (const auto& e : edges) pairs.push_back({e.u, e.v});
    return EntangledHypergraph(agents, pairs);
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

inline std::string to_string(NetworkSpec::Mode mode) {
  return mode == NetworkSpec::Mode::epr_graph ? "epr-graph" : "hypergraph";
}

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

inline int parse_int(std::string_view word, std::size_t line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(word) + "'");
  }
  return value;
}

inline double parse_weight(std::string_view word, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || ptr != word.data() + word.size() || !std::isfinite(value)) {
    throw ParseError(line, "expected a weight, got '" + std::string(word) + "'");
  }
  if (value < 0.0) throw ParseError(line, "edge weight must be non-negative");
  return value;
}

inline std::string format_weight(double w) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, ptr);
}

}  // namespace detail

inline NetworkSpec parse_spec(std::string_view text) {
  NetworkSpec spec;
  bool have_agents = false;
  bool have_edges = false;
  bool have_hyper = false;
  std::size_t line_no = 0;

  const auto check_agent = [&](int a, std::size_t line) {
    if (a < 1 || a > spec.agents) {
      throw ParseError(line, "agent " + std::to_string(a) + " out of range 1.." +
                                 std::to_string(spec.agents));
    }
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto words = detail::split_words(line);
    if (words.empty()) {
      if (end == text.size()) break;
      continue;
    }

    const std::string_view keyword = words[0];
    if (!have_agents) {
      if (keyword != "agents") throw ParseError(line_no, "first declaration must be 'agents N'");
      if (words.size() != 2) throw ParseError(line_no, "usage: agents N");
      spec.agents = detail::parse_int(words[1], line_no);
      if (spec.agents < 1) throw ParseError(line_no, "agent count must be at least 1");
      have_agents = true;
    } else if (keyword == "agents") {
      throw ParseError(line_no, "agent count declared twice");
    } else if (keyword == "edge") {
      if (have_hyper) throw ParseError(line_no, "cannot mix 'edge' and 'hyper' declarations");
      if (words.size() != 3 && words.size() != 4) throw ParseError(line_no, "usage: edge i j [w]");
      const int a = detail::parse_int(words[1], line_no);
      const int b = detail::parse_int(words[2], line_no);
      check_agent(a, line_no);
      check_agent(b, line_no);
      if (a == b) throw ParseError(line_no, "self-loop on agent " + std::to_string(a));
      NetworkSpec::EdgeLine e{std::min(a, b), std::max(a, b), std::nullopt};
      if (words.size() == 4) e.weight = detail::parse_weight(words[3], line_no);
      for (const auto& other : spec.edges) {
        if (other.u == e.u && other.v == e.v) {
          throw ParseError(line_no, "duplicate edge " + std::to_string(e.u) + " " +
                                        std::to_string(e.v));
        }
      }
      spec.edges.push_back(e);
      have_edges = true;
    } else if (keyword == "hyper") {
      if (have_edges) throw ParseError(line_no, "cannot mix 'edge' and 'hyper' declarations");
      std::vector<int> members;
      for (std::size_t i = 1; i < words.size(); ++i) {
        const int a = detail::parse_int(words[i], line_no);
        check_agent(a, line_no);
        members.push_back(a);
      }
      std::sort(members.begin(), members.end());
      if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
        throw ParseError(line_no, "hyperedge lists an agent twice");
      }
      if (members.size() < 2) throw ParseError(line_no, "hyperedges need at least two agents");
      spec.hyperedges.push_back(std::move(members));
      have_hyper = true;
    } else {
      throw ParseError(line_no, "unknown declaration '" + std::string(keyword) + "'");
    }
    if (end == text.size()) break;
  }
  if (!have_agents) throw ParseError(line_no, "missing 'agents N' declaration");
  spec.mode = have_hyper ? NetworkSpec::Mode::hypergraph : NetworkSpec::Mode::epr_graph;
  return spec;
}

// Normalised text: one declaration per line, endpoints and members ascending.
inline std::string serialize_spec(const NetworkSpec& spec) {
  std::ostringstream out;
  out << "agents " << spec.agents << '\n';
  for (const auto& e : spec.edges) {
    out << "edge " << e.u << ' ' << e.v;
    if (e.weight) out << ' ' << detail::format_weight(*e.weight);
    out << '\n';
  }
  for (const auto& h : spec.hyperedges) {
    out << "hyper";
    for (int a : h) out << ' ' << a;
    out << '\n';
  }
  return out.str();
}

// FNV-1a, 64-bit, as 16 hex digits.
inline std::string spec_hash(const NetworkSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_spec(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

}  // namespace ghznet
