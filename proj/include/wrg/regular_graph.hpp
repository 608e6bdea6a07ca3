#pragma once

// Simple d-regular graphs: uniform generation by the configuration model,
// radius-R neighborhoods, tree-likeness census, and masked components.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "union_find.hpp"

namespace wrg {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One flag per canonical edge; nonzero means the edge is present.
using EdgeMask = std::vector<std::uint8_t>;

class RegularGraph {
 public:
  RegularGraph() = default;

  /// Builds a graph from an unordered edge list and checks every invariant:
  /// no loops, no repeated edges, every degree exactly d.
  static RegularGraph from_edges(std::size_t n, std::size_t d, std::vector<Edge> edges,
                                 std::uint64_t seed = 0) {
    require(n > 0, Errc::invalid_parameters, "n must be positive");
    require(d >= 1, Errc::invalid_parameters, "d must be at least 1");
    require((n * d) % 2 == 0, Errc::invalid_parameters, "n*d must be even");
    require(edges.size() == n * d / 2, Errc::invalid_parameters,
            "edge count must equal n*d/2");
    for (auto& e : edges) {
      require(e.u < n && e.v < n, Errc::vertex_out_of_range, "edge endpoint out of range");
      require(e.u != e.v, Errc::invalid_parameters, "self-loop");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(),
            Errc::invalid_parameters, "repeated edge");

    RegularGraph g;
    g.n_ = n;
    g.d_ = d;
    g.seed_ = seed;
    g.edges_ = std::move(edges);
    g.neighbors_.assign(n * d, 0);
    g.incident_.assign(n * d, 0);
    std::vector<std::size_t> fill(n, 0);
    for (EdgeId id = 0; id < g.edges_.size(); ++id) {
      const auto [u, v] = g.edges_[id];
      require(fill[u] < d && fill[v] < d, Errc::invalid_parameters, "degree exceeds d");
      g.neighbors_[u * d + fill[u]] = v;
      g.incident_[u * d + fill[u]++] = id;
      g.neighbors_[v * d + fill[v]] = u;
      g.incident_[v * d + fill[v]++] = id;
    }
    for (std::size_t v = 0; v < n; ++v) {
      require(fill[v] == d, Errc::invalid_parameters, "vertex degree differs from d");
      // Insertion sort keeps neighbors_ and incident_ aligned.
      Vertex* nb = g.neighbors_.data() + v * d;
      EdgeId* inc = g.incident_.data() + v * d;
      for (std::size_t a = 1; a < d; ++a) {
        for (std::size_t b = a; b > 0 && nb[b - 1] > nb[b]; --b) {
          std::swap(nb[b - 1], nb[b]);
          std::swap(inc[b - 1], inc[b]);
        }
      }
    }
    return g;
  }

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t seed() const { return seed_; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_[id]; }

  /// Sorted neighbor ids of v.
  std::span<const Vertex> neighbors(Vertex v) const {
    return {neighbors_.data() + static_cast<std::size_t>(v) * d_, d_};
  }
  /// Edge ids aligned with neighbors(v).
  std::span<const EdgeId> incident(Vertex v) const {
    return {incident_.data() + static_cast<std::size_t>(v) * d_, d_};
  }

  std::optional<EdgeId> edge_id(Vertex a, Vertex b) const {
    if (a >= n_ || b >= n_) return std::nullopt;
    const auto nb = neighbors(a);
    const auto it = std::lower_bound(nb.begin(), nb.end(), b);
    if (it == nb.end() || *it != b) return std::nullopt;
    return incident(a)[static_cast<std::size_t>(it - nb.begin())];
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Edge> edges_;
  std::vector<Vertex> neighbors_;
  std::vector<EdgeId> incident_;
};

inline void check_regular_parameters(std::size_t n, std::size_t d) {
  require(d >= 1, Errc::invalid_parameters, "d must be at least 1");
  require(n > d, Errc::invalid_parameters, "n must exceed d");
  require((n * d) % 2 == 0, Errc::invalid_parameters, "n*d must be even");
  require(n <= 0xffffffffULL / d, Errc::invalid_parameters, "n*d too large");
}

/// One round of the configuration model: pairs the n*d half-edges uniformly
/// and returns the graph, or nothing if the pairing has a loop or multi-edge.
inline std::optional<RegularGraph> pairing_attempt(std::size_t n, std::size_t d, Rng& rng,
                                                   std::uint64_t seed_tag = 0) {
  const std::size_t points = n * d;
  std::vector<Vertex> half(points);
  for (std::size_t k = 0; k < points; ++k) half[k] = static_cast<Vertex>(k / d);
  std::vector<Vertex> adj(points);
  std::vector<std::uint32_t> deg(n, 0);
  std::vector<Edge> edges;
  edges.reserve(points / 2);
  for (std::size_t i = 0; i < points; i += 2) {
    // Partner of half-edge i drawn uniformly from the unpaired ones.
    const std::size_t j = i + 1 + rng.below(points - i - 1);
    std::swap(half[i + 1], half[j]);
    const Vertex a = half[i];
    const Vertex b = half[i + 1];
    if (a == b) return std::nullopt;
    for (std::uint32_t k = 0; k < deg[a]; ++k)
      if (adj[a * d + k] == b) return std::nullopt;
    adj[a * d + deg[a]++] = b;
    adj[b * d + deg[b]++] = a;
    edges.push_back(a < b ? Edge{a, b} : Edge{b, a});
  }
  return RegularGraph::from_edges(n, d, std::move(edges), seed_tag);
}

inline constexpr std::size_t kDefaultRetryCap = 10000;

/// Uniform simple d-regular graph on n vertices. Pairings are redrawn from
/// scratch until one is simple, which conditions the configuration model on
/// simplicity and therefore samples exactly uniformly.
inline RegularGraph generate_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                                     std::size_t retry_cap = kDefaultRetryCap) {
  check_regular_parameters(n, d);
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < retry_cap; ++attempt) {
    if (auto g = pairing_attempt(n, d, rng, seed)) return std::move(*g);
  }
  throw Error(Errc::retry_budget_exceeded,
              "no simple pairing after " + std::to_string(retry_cap) + " attempts");
}

// ---------------------------------------------------------------------------
// Neighborhoods

struct BallReport {
  Vertex root = 0;
  std::size_t radius = 0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t excess = 0;  // edge_count - vertex_count + 1
  bool contains_cycle = false;
};

struct Ball {
  BallReport report;
  std::vector<Vertex> vertices;  // BFS order, root first
  std::vector<EdgeId> edges;     // induced edges, sorted
};

/// Reusable BFS scratch for repeated ball queries on one graph. Not thread-safe.
class BallScanner {
 public:
  explicit BallScanner(const RegularGraph& g, std::span<const std::uint8_t> mask = {})
      : g_(&g), mask_(mask), dist_(g.n(), kUnseen) {
    require(mask.empty() || mask.size() == g.edge_count(), Errc::mask_length_mismatch,
            "mask length must equal edge count");
  }

  BallReport scan(Vertex root, std::size_t radius) {
    require(root < g_->n(), Errc::vertex_out_of_range, "ball root out of range");
    for (Vertex v : order_) dist_[v] = kUnseen;
    order_.clear();
    order_.push_back(root);
    dist_[root] = 0;
    std::size_t twice_edges = 0;
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const Vertex v = order_[head];
      const auto nb = g_->neighbors(v);
      const auto inc = g_->incident(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (!mask_.empty() && !mask_[inc[k]]) continue;
        const Vertex w = nb[k];
        if (dist_[w] == kUnseen && dist_[v] < radius) {
          dist_[w] = dist_[v] + 1;
          order_.push_back(w);
        }
      }
    }
    // Induced edge count: every masked edge with both ends in the ball.
    for (Vertex v : order_) {
      const auto nb = g_->neighbors(v);
      const auto inc = g_->incident(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (!mask_.empty() && !mask_[inc[k]]) continue;
        if (dist_[nb[k]] != kUnseen) ++twice_edges;
      }
    }
    BallReport r;
    r.root = root;
    r.radius = radius;
    r.vertex_count = order_.size();
    r.edge_count = twice_edges / 2;
    r.excess = r.edge_count + 1 - r.vertex_count;
    r.contains_cycle = r.excess >= 1;
    return r;
  }

  std::span<const Vertex> vertices() const { return order_; }

  std::vector<EdgeId> induced_edges() const {
    std::vector<EdgeId> out;
    for (Vertex v : order_) {
      const auto nb = g_->neighbors(v);
      const auto inc = g_->incident(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (!mask_.empty() && !mask_[inc[k]]) continue;
        if (v < nb[k] && dist_[nb[k]] != kUnseen) out.push_back(inc[k]);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  const RegularGraph* g_;
  std::span<const std::uint8_t> mask_;
  std::vector<std::size_t> dist_;
  std::vector<Vertex> order_;
};

/// Subgraph induced by {u : dist(v, u) <= R}.
inline Ball ball(const RegularGraph& g, Vertex v, std::size_t radius,
                 std::span<const std::uint8_t> mask = {}) {
  BallScanner scanner(g, mask);
  Ball b;
  b.report = scanner.scan(v, radius);
  b.vertices.assign(scanner.vertices().begin(), scanner.vertices().end());
  b.edges = scanner.induced_edges();
  return b;
}

/// Upper bound 1 + d((d-1)^R - 1)/(d-2) on a ball's vertex count (d >= 3).
inline double tree_ball_size(std::size_t d, std::size_t radius) {
  double total = 1.0;
  double level = static_cast<double>(d);
  for (std::size_t r = 1; r <= radius; ++r) {
    total += level;
    level *= static_cast<double>(d - 1);
  }
  return total;
}

struct TreeLikenessCensus {
  std::size_t radius = 0;
  std::size_t max_excess = 0;
  std::size_t cyclic_vertex_count = 0;
};

/// Exact max ball excess and number of cyclic balls over all vertices.
inline TreeLikenessCensus census(const RegularGraph& g, std::size_t radius,
                                 std::span<const std::uint8_t> mask = {}) {
  require(radius >= 1, Errc::invalid_parameters, "census radius must be at least 1");
  BallScanner scanner(g, mask);
  TreeLikenessCensus c;
  c.radius = radius;
  for (Vertex v = 0; v < g.n(); ++v) {
    const auto r = scanner.scan(v, radius);
    c.max_excess = std::max(c.max_excess, r.excess);
    if (r.contains_cycle) ++c.cyclic_vertex_count;
  }
  return c;
}

/// R_n = floor(0.2 log_{d-1} n), at least 1.
inline std::size_t default_census_radius(std::size_t n, std::size_t d) {
  if (d < 3) return 1;
  const double r = std::floor(0.2 * std::log(static_cast<double>(n)) /
                              std::log(static_cast<double>(d - 1)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

// ---------------------------------------------------------------------------
// Components of a masked subgraph

struct ComponentPartition {
  std::vector<std::uint32_t> label;             // component index per vertex
  std::vector<std::vector<Vertex>> vertices;    // sorted ascending
  std::vector<std::vector<EdgeId>> edges;       // sorted ascending

  std::size_t count() const { return vertices.size(); }
};

/// Connected components of the subgraph keeping the masked edges. Components
/// are numbered by their smallest vertex; untouched vertices are singletons.
inline ComponentPartition components(const RegularGraph& g, std::span<const std::uint8_t> mask) {
  require(mask.size() == g.edge_count(), Errc::mask_length_mismatch,
          "mask length must equal edge count");
  UnionFind uf(g.n());
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e)
    if (mask[e]) uf.unite(edges[e].u, edges[e].v);

  ComponentPartition p;
  p.label.assign(g.n(), 0);
  std::vector<std::uint32_t> root_label(g.n(), static_cast<std::uint32_t>(-1));
  for (Vertex v = 0; v < g.n(); ++v) {
    const auto r = uf.find(v);
    if (root_label[r] == static_cast<std::uint32_t>(-1)) {
      root_label[r] = static_cast<std::uint32_t>(p.vertices.size());
      p.vertices.emplace_back();
      p.edges.emplace_back();
    }
    p.label[v] = root_label[r];
    p.vertices[root_label[r]].push_back(v);
  }
  for (EdgeId e = 0; e < edges.size(); ++e)
    if (mask[e]) p.edges[p.label[edges[e].u]].push_back(e);
  return p;
}

}  // namespace wrg
