#pragma once

// Combinatorial side of the network: which agents share EPR pairs (a graph)
// or larger GHZ-form states (a hypergraph), and the spanning structures the
// protocols walk.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "ghznet/errors.hpp"

namespace ghznet {

struct AgentId {
  int value{};

  constexpr AgentId() = default;
  constexpr explicit AgentId(int v) : value(v) {}

  friend constexpr auto operator<=>(const AgentId&, const AgentId&) = default;
};

inline std::string to_string(AgentId a) { return "A" + std::to_string(a.value); }

struct Edge {
  AgentId u;  // u < v
  AgentId v;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool edge_less(const Edge& a, const Edge& b) {
  return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

class EprGraph {
 public:
  explicit EprGraph(int n) : n_(n) {
    if (n < 1) throw InvalidArgument("an EPR graph needs at least one agent");
  }

  EprGraph(int n, std::initializer_list<std::pair<int, int>> edges) : EprGraph(n) {
    for (auto [a, b] : edges) add_edge(AgentId{a}, AgentId{b});
  }

  int agent_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Agents may share at most one EPR pair.
  void add_edge(AgentId a, AgentId b, std::optional<double> weight = std::nullopt) {
    check_agent(a);
    check_agent(b);
    if (a == b) throw InvalidArgument("self-loop on " + to_string(a));
    if (weight && !(*weight >= 0.0)) throw InvalidArgument("edge weight must be non-negative");
    Edge e{std::min(a, b), std::max(a, b), weight.value_or(1.0)};
    if (has_edge(e.u, e.v)) {
      throw InvalidArgument("duplicate edge " + to_string(e.u) + "-" + to_string(e.v));
    }
    weighted_ = weighted_ || weight.has_value();
    edges_.push_back(e);
  }

  bool has_edge(AgentId a, AgentId b) const {
    const AgentId u = std::min(a, b);
    const AgentId v = std::max(a, b);
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const Edge& e) { return e.u == u && e.v == v; });
  }

  bool has_weights() const noexcept { return weighted_; }

  // Neighbours of a in increasing index order.
  std::vector<AgentId> neighbors(AgentId a) const {
    std::vector<AgentId> out;
    for (const auto& e : edges_) {
      if (e.u == a) out.push_back(e.v);
      if (e.v == a) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void check_agent(AgentId a) const {
    if (a.value < 1 || a.value > n_) {
      throw InvalidArgument("agent " + std::to_string(a.value) + " out of range 1.." +
                            std::to_string(n_));
    }
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  bool weighted_ = false;
};

// A spanning EPR tree with its distinguished vertices: the leaf T the
// protocol starts from, T's neighbour S, and the leaf set L.
struct SpanningTree {
  int n = 0;
  std::vector<Edge> edges;  // lexicographic
  AgentId root_leaf;        // T
  AgentId start;            // S
  std::vector<AgentId> leaves;

  std::size_t leaf_count() const noexcept { return leaves.size(); }

  double total_weight() const {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }

  std::vector<AgentId> neighbors(AgentId a) const {
    std::vector<AgentId> out;
    for (const auto& e : edges) {
      if (e.u == a) out.push_back(e.v);
      if (e.v == a) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_leaf(AgentId a) const {
    return std::binary_search(leaves.begin(), leaves.end(), a);
  }

  EprGraph as_graph() const {
    EprGraph g(n);
    for (const auto& e : edges) g.add_edge(e.u, e.v, e.weight);
    return g;
  }
};

namespace detail {

// Agents reachable from `from`, indexed 1..n.
inline std::vector<bool> reachable(const EprGraph& g, AgentId from) {
  const int n = g.agent_count();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (const auto& e : g.edges()) {
    adj[e.u.value].push_back(e.v.value);
    adj[e.v.value].push_back(e.u.value);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::vector<int> stack{from.value};
  seen[from.value] = true;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (int b : adj[a]) {
      if (!seen[b]) {
        seen[b] = true;
        stack.push_back(b);
      }
    }
  }
  return seen;
}

inline void require_connected(const EprGraph& g) {
  const auto seen = reachable(g, AgentId{1});
  for (int a = 2; a <= g.agent_count(); ++a) {
    if (!seen[a]) {
      throw ConnectivityError("EPR graph is disconnected: no path between A1 and A" +
                                  std::to_string(a) +
                                  "; a pure n-partite maximally entangled state can be prepared "
                                  "if and only if the EPR graph is connected",
                              1, a);
    }
  }
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

inline SpanningTree finish_tree(int n, std::vector<Edge> edges) {
  SpanningTree t;
  t.n = n;
  std::sort(edges.begin(), edges.end(), edge_less);
  t.edges = std::move(edges);
  std::vector<int> degree(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : t.edges) {
    ++degree[e.u.value];
    ++degree[e.v.value];
  }
  for (int a = 1; a <= n; ++a) {
    if (degree[a] == 1) t.leaves.push_back(AgentId{a});
  }
  t.root_leaf = t.leaves.front();
  t.start = t.neighbors(t.root_leaf).front();
  return t;
}

}  // namespace detail

inline bool is_connected(const EprGraph& g) {
  const auto seen = detail::reachable(g, AgentId{1});
  return std::all_of(seen.begin() + 1, seen.end(), [](bool b) { return b; });
}

// Breadth-first tree from agent 1, neighbours in increasing index order.
inline SpanningTree spanning_tree(const EprGraph& g) {
  if (g.agent_count() < 2) throw InvalidArgument("a spanning EPR tree needs at least two agents");
  detail::require_connected(g);
  const int n = g.agent_count();
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::vector<Edge> tree;
  std::queue<AgentId> frontier;
  frontier.push(AgentId{1});
  seen[1] = true;
  while (!frontier.empty()) {
    const AgentId a = frontier.front();
    frontier.pop();
    for (AgentId b : g.neighbors(a)) {
      if (seen[b.value]) continue;
      seen[b.value] = true;
      const auto it = std::find_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
        return e.u == std::min(a, b) && e.v == std::max(a, b);
      });
      tree.push_back(*it);
      frontier.push(b);
    }
  }
  return detail::finish_tree(n, std::move(tree));
}

// Kruskal; equal weights fall back to lexicographic edge order.
inline SpanningTree minimum_spanning_tree(const EprGraph& g) {
  if (g.agent_count() < 2) throw InvalidArgument("a spanning EPR tree needs at least two agents");
  detail::require_connected(g);
  std::vector<Edge> candidates = g.edges();
  std::sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.weight, a.u, a.v) < std::tie(b.weight, b.u, b.v);
  });
  detail::DisjointSet components(static_cast<std::size_t>(g.agent_count()) + 1);
  std::vector<Edge> tree;
  for (const auto& e : candidates) {
    if (components.unite(e.u.value, e.v.value)) tree.push_back(e);
  }
  return detail::finish_tree(g.agent_count(), std::move(tree));
}

// Validates an explicit edge list as a spanning tree on 1..n.
inline SpanningTree tree_from_edges(int n, std::vector<Edge> edges) {
  if (n < 2) throw InvalidArgument("a spanning EPR tree needs at least two agents");
  if (edges.size() != static_cast<std::size_t>(n - 1)) {
    throw InvalidArgument("a spanning tree on n agents has exactly n-1 edges");
  }
  EprGraph g(n);
  for (const auto& e : edges) g.add_edge(e.u, e.v, e.weight);
  detail::require_connected(g);
  return detail::finish_tree(n, g.edges());
}

struct Hyperedge {
  std::vector<AgentId> members;  // ascending
  std::size_t original_index = 0;

  bool contains(AgentId a) const {
    return std::binary_search(members.begin(), members.end(), a);
  }
};

// Hyperedges are kept sorted by decreasing size, ties by declaration order.
class EntangledHypergraph {
 public:
  EntangledHypergraph(int n, const std::vector<std::vector<int>>& hyperedges) : n_(n) {
    if (n < 1) throw InvalidArgument("a hypergraph needs at least one agent");
    for (std::size_t i = 0; i < hyperedges.size(); ++i) {
      Hyperedge h;
      h.original_index = i;
      for (int a : hyperedges[i]) {
        if (a < 1 || a > n) {
          throw InvalidArgument("agent " + std::to_string(a) + " out of range 1.." +
                                std::to_string(n));
        }
        h.members.push_back(AgentId{a});
      }
      std::sort(h.members.begin(), h.members.end());
      if (std::adjacent_find(h.members.begin(), h.members.end()) != h.members.end()) {
        throw InvalidArgument("hyperedge repeats an agent");
      }
      if (h.members.size() < 2) throw InvalidArgument("hyperedges need at least two agents");
      edges_.push_back(std::move(h));
    }
    std::stable_sort(edges_.begin(), edges_.end(), [](const Hyperedge& a, const Hyperedge& b) {
      return a.members.size() > b.members.size();
    });
  }

  int agent_count() const noexcept { return n_; }
  const std::vector<Hyperedge>& hyperedges() const noexcept { return edges_; }

 private:
  int n_;
  std::vector<Hyperedge> edges_;
};

// Every EPR graph is a hypergraph of 2-element hyperedges.
inline EntangledHypergraph as_hypergraph(const EprGraph& g) {
  std::vector<std::vector<int>> edges;
  for (const auto& e : g.edges()) edges.push_back({e.u.value, e.v.value});
  return EntangledHypergraph(g.agent_count(), edges);
}

namespace detail {

// Breadth-first over the agent/hyperedge incidence structure.
inline std::vector<bool> hyper_reachable(const EntangledHypergraph& h, AgentId from) {
  const int n = h.agent_count();
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::vector<bool> used(h.hyperedges().size(), false);
  std::queue<AgentId> frontier;
  frontier.push(from);
  seen[from.value] = true;
  while (!frontier.empty()) {
    const AgentId a = frontier.front();
    frontier.pop();
    for (std::size_t i = 0; i < h.hyperedges().size(); ++i) {
      if (used[i] || !h.hyperedges()[i].contains(a)) continue;
      used[i] = true;
      for (AgentId b : h.hyperedges()[i].members) {
        if (!seen[b.value]) {
          seen[b.value] = true;
          frontier.push(b);
        }
      }
    }
  }
  return seen;
}

inline void require_connected(const EntangledHypergraph& h) {
  const auto seen = hyper_reachable(h, AgentId{1});
  for (int a = 2; a <= h.agent_count(); ++a) {
    if (!seen[a]) {
      throw ConnectivityError("entangled hypergraph is disconnected: no hyperpath between A1 and A" +
                                  std::to_string(a) +
                                  "; a pure n-partite maximally entangled state can be prepared "
                                  "if and only if the entangled hypergraph is connected",
                              1, a);
    }
  }
}

}  // namespace detail

inline bool hypergraph_is_connected(const EntangledHypergraph& h) {
  const auto seen = detail::hyper_reachable(h, AgentId{1});
  return std::all_of(seen.begin() + 1, seen.end(), [](bool b) { return b; });
}

// One fusion of hyperedge `hyperedge` into the running entangled set F.
struct MergeStep {
  std::size_t hyperedge = 0;  // index into EntangledHypergraph::hyperedges()
  AgentId junction;           // smallest agent of `overlap`
  std::vector<AgentId> overlap;
  std::size_t pre_size = 0;  // |F| before the step
  std::size_t add_size = 0;  // |E_i|

  std::size_t post_size() const noexcept { return pre_size + add_size - overlap.size(); }
};

// Greedy fusion order: F starts as the largest hyperedge; each step takes the
// lowest-index hyperedge that meets F without lying inside it. Hyperedges
// already inside F produce no step.
inline std::vector<MergeStep> merge_schedule(const EntangledHypergraph& h) {
  const auto& edges = h.hyperedges();
  if (edges.empty()) throw InvalidArgument("merge schedule needs at least one hyperedge");
  detail::require_connected(h);

  std::vector<AgentId> f = edges.front().members;
  std::vector<bool> pending(edges.size(), true);
  pending[0] = false;
  std::vector<MergeStep> steps;

  const auto inside_f = [&](const Hyperedge& e) {
    return std::includes(f.begin(), f.end(), e.members.begin(), e.members.end());
  };

  for (;;) {
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (pending[i] && inside_f(edges[i])) pending[i] = false;
    }
    std::optional<std::size_t> chosen;
    std::vector<AgentId> overlap;
    for (std::size_t i = 1; i < edges.size() && !chosen; ++i) {
      if (!pending[i]) continue;
      overlap.clear();
      std::set_intersection(f.begin(), f.end(), edges[i].members.begin(), edges[i].members.end(),
                            std::back_inserter(overlap));
      if (!overlap.empty()) chosen = i;
    }
    if (!chosen) break;

    MergeStep step;
    step.hyperedge = *chosen;
    step.junction = overlap.front();
    step.overlap = overlap;
    step.pre_size = f.size();
    step.add_size = edges[*chosen].members.size();
    steps.push_back(std::move(step));

    std::vector<AgentId> merged;
    std::set_union(f.begin(), f.end(), edges[*chosen].members.begin(),
                   edges[*chosen].members.end(), std::back_inserter(merged));
    f = std::move(merged);
    pending[*chosen] = false;
  }
  return steps;
}

// Hyperedges (other than the first) that the schedule never fuses.
inline std::vector<std::size_t> redundant_hyperedges(const EntangledHypergraph& h,
                                                     const std::vector<MergeStep>& steps) {
  std::vector<bool> fused(h.hyperedges().size(), false);
  if (!fused.empty()) fused[0] = true;
  for (const auto& s : steps) fused[s.hyperedge] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fused.size(); ++i) {
    if (!fused[i]) out.push_back(i);
  }
  return out;
}

}  // namespace ghznet
