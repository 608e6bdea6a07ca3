#pragma once

// Truncation of a weighted network into a sparse heavy part and a bounded
// light part, the spanning-tree / tree-excess split of the heavy part, and
// per-component statistics of a top eigenvector.
//
//   X = X1 + X2          X1 keeps edges with |W| > b^(1/alpha)
//   X1 = X11 + X12       X11: BFS spanning forest of X1, X12: tree-excess edges

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "regular_graph.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "weights.hpp"

namespace wrg {

inline double truncation_schedule_b(std::size_t n, double alpha) {
  const double ln = std::log(static_cast<double>(n));
  return alpha > 1.0 ? std::pow(ln, alpha / (2 * alpha + 1)) : std::pow(ln, alpha / (alpha + 2));
}

inline double truncation_schedule_a(std::size_t n, double alpha, double kappa) {
  const double ln = std::log(static_cast<double>(n));
  return alpha > 1.0 ? std::pow(ln, (alpha + 1) / (2 * alpha + 1) + kappa) : std::pow(ln, 2 / (alpha + 2) + kappa);
}

struct DecompositionParams {
  double alpha = 1.0;
  double b = 1.0;       // keep edges with |W| > b^(1/alpha)
  double kappa = 0.05;  // exponent slack in the a_n schedule
  double a = 0.0;       // a_n; zero unless built from the schedule
  std::optional<double> a_tilde;  // a_n for 1 < alpha <= 2, log n for alpha > 2

  double threshold() const { return std::pow(b, 1.0 / alpha); }

  static DecompositionParams fixed(double alpha, double b) {
    require(std::isfinite(alpha) && alpha > 0, Errc::invalid_parameters, "alpha must be positive");
    require(b > 0, Errc::invalid_parameters, "truncation level b must be positive");
    DecompositionParams p;
    p.alpha = alpha;
    p.b = b;
    return p;
  }

  /// b = b_n and a = a_n for a graph on n vertices.
  static DecompositionParams schedule(std::size_t n, double alpha, double kappa = 0.05) {
    require(n >= 3, Errc::invalid_parameters, "schedule needs n >= 3");
    require(kappa > 0, Errc::invalid_parameters, "kappa must be positive");
    auto p = fixed(alpha, truncation_schedule_b(n, alpha));
    p.kappa = kappa;
    p.a = truncation_schedule_a(n, alpha, kappa);
    if (alpha > 2.0)
      p.a_tilde = std::log(static_cast<double>(n));
    else if (alpha > 1.0)
      p.a_tilde = p.a;
    return p;
  }
};

struct TruncationMasks {
  EdgeMask kept;   // X1
  EdgeMask small;  // X2
};

inline TruncationMasks truncate(const WeightedNetwork& net, const DecompositionParams& p) {
  const double t = p.threshold();
  TruncationMasks m;
  m.kept.resize(net.graph().edge_count());
  m.small.resize(net.graph().edge_count());
  for (EdgeId e = 0; e < m.kept.size(); ++e) {
    const bool heavy = std::abs(net.weight(e)) > t;
    m.kept[e] = heavy;
    m.small[e] = !heavy;
  }
  return m;
}

struct Decomposition {
  DecompositionParams params;
  EdgeMask kept;    // X1
  EdgeMask small;   // X2
  EdgeMask tree;    // X11
  EdgeMask excess;  // X12
  ComponentPartition parts;  // components of A1, isolated vertices included
  std::vector<std::vector<EdgeId>> tree_edges;    // per component
  std::vector<std::vector<EdgeId>> excess_edges;  // per component

  /// Components with at least one edge, in component order.
  std::vector<std::uint32_t> nontrivial() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t k = 0; k < parts.count(); ++k)
      if (!parts.edges[k].empty()) out.push_back(k);
    return out;
  }
};

/// BFS spanning tree of every component from its lowest-id vertex, visiting
/// neighbours in increasing id; component edges outside the tree are excess.
inline void split_excess(const RegularGraph& g, Decomposition& dec) {
  const std::size_t n = g.n();
  dec.tree.assign(g.edge_count(), 0);
  dec.excess.assign(g.edge_count(), 0);
  dec.tree_edges.assign(dec.parts.count(), {});
  dec.excess_edges.assign(dec.parts.count(), {});
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<Vertex> queue;
  for (std::size_t k = 0; k < dec.parts.count(); ++k) {
    if (dec.parts.edges[k].empty()) continue;
    queue.assign(1, dec.parts.vertices[k].front());
    seen[queue[0]] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex v = queue[head];
      const auto nb = g.neighbors(v);
      const auto inc = g.incident(v);
      for (std::size_t j = 0; j < nb.size(); ++j) {
        if (!dec.kept[inc[j]] || seen[nb[j]]) continue;
        seen[nb[j]] = 1;
        dec.tree[inc[j]] = 1;
        queue.push_back(nb[j]);
      }
    }
    for (EdgeId e : dec.parts.edges[k]) {
      if (dec.tree[e])
        dec.tree_edges[k].push_back(e);
      else {
        dec.excess[e] = 1;
        dec.excess_edges[k].push_back(e);
      }
    }
  }
}

inline Decomposition decompose(const WeightedNetwork& net, const DecompositionParams& p) {
  Decomposition dec;
  dec.params = p;
  auto masks = truncate(net, p);
  dec.kept = std::move(masks.kept);
  dec.small = std::move(masks.small);
  dec.parts = components(net.graph(), dec.kept);
  split_excess(net.graph(), dec);
  return dec;
}

// ---------------------------------------------------------------------------
// Component statistics of a unit vector f

struct ComponentStats {
  std::uint32_t component = 0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;    // spanning-tree edges
  std::size_t excess_count = 0;  // tree-excess edges
  double S = 0.0;                // l^alpha norm of the tree-edge weights
  double x = 0.0;                // sum of f_i^2 over the component
  std::optional<double> F;       // (sum over directed tree edges |f_i f_j|^beta)^(1/beta), alpha > 1
  double M = 0.0;                // max over tree edges of f_i^2 + f_j^2
};

struct ComponentSummary {
  std::vector<ComponentStats> components;  // S descending, ties by component index
  double isolated_mass = 0.0;              // f mass on vertices with no heavy edge
};

inline ComponentSummary component_stats(const WeightedNetwork& net, const Decomposition& dec,
                                        std::span<const double> f) {
  const auto& g = net.graph();
  require(f.size() == g.n(), Errc::invalid_parameters, "vector length must equal n");
  const double alpha = dec.params.alpha;
  ComponentSummary out;
  for (std::uint32_t k = 0; k < dec.parts.count(); ++k) {
    if (dec.parts.edges[k].empty()) {
      const Vertex v = dec.parts.vertices[k].front();
      out.isolated_mass += f[v] * f[v];
      continue;
    }
    ComponentStats c;
    c.component = k;
    c.vertex_count = dec.parts.vertices[k].size();
    c.edge_count = dec.tree_edges[k].size();
    c.excess_count = dec.excess_edges[k].size();
    for (Vertex v : dec.parts.vertices[k]) c.x += f[v] * f[v];
    double s = 0.0, h = 0.0;
    const double beta = alpha > 1.0 ? alpha / (alpha - 1.0) : 0.0;
    for (EdgeId e : dec.tree_edges[k]) {
      const Edge ed = g.edge(e);
      s += std::pow(std::abs(net.weight(e)), alpha);
      c.M = std::max(c.M, f[ed.u] * f[ed.u] + f[ed.v] * f[ed.v]);
      if (alpha > 1.0) h += 2.0 * std::pow(std::abs(f[ed.u] * f[ed.v]), beta);
    }
    c.S = std::pow(s, 1.0 / alpha);
    if (alpha > 1.0) c.F = std::pow(h, 1.0 / beta);
    out.components.push_back(c);
  }
  std::stable_sort(out.components.begin(), out.components.end(),
                   [](const ComponentStats& a, const ComponentStats& b) { return a.S > b.S; });
  return out;
}

// ---------------------------------------------------------------------------
// Localization of a unit vector

struct LocalizationReport {
  double eps = 0.0;
  std::size_t min_support_size = 0;  // fewest vertices with l2 norm >= 1 - eps
  double top_edge_mass = 0.0;        // max over edges of f_i^2 + f_j^2
  std::vector<Edge> disjoint_edges;  // greedy heavy matching, empty for alpha >= 2
  std::vector<double> disjoint_cumulative_mass;
  std::optional<std::size_t> heavy_component_count;
};

/// Fewest coordinates whose l2 norm reaches 1 - eps. Taking the largest
/// |f_i| first is optimal, so the prefix length is the exact minimum.
inline std::size_t min_support_size(std::span<const double> f, double eps) {
  require(eps > 0.0 && eps < 1.0, Errc::invalid_parameters, "eps must lie in (0,1)");
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  std::sort(sq.begin(), sq.end(), std::greater<>());
  const double target = (1.0 - eps) * (1.0 - eps) * (1.0 - 1e-12);
  double acc = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    acc += sq[k];
    if (acc >= target) return k + 1;
  }
  return sq.size();
}

inline std::size_t heavy_component_count(const ComponentSummary& s, double threshold) {
  return static_cast<std::size_t>(std::count_if(s.components.begin(), s.components.end(),
                                                [&](const ComponentStats& c) { return c.S > threshold; }));
}

/// Greedy vertex-disjoint edges by decreasing f_i^2 + f_j^2 until their
/// endpoints carry l2 norm 1 - eps (or no edge with positive mass is left).
inline void greedy_disjoint_edges(const RegularGraph& g, std::span<const double> f, double eps,
                                  LocalizationReport& r) {
  std::vector<std::pair<double, EdgeId>> order;
  order.reserve(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    const double m = f[ed.u] * f[ed.u] + f[ed.v] * f[ed.v];
    if (m > 0) order.emplace_back(m, e);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const double target = (1.0 - eps) * (1.0 - eps);
  std::vector<std::uint8_t> used(g.n(), 0);
  double acc = 0.0;
  for (const auto& [m, e] : order) {
    if (acc >= target) break;
    const Edge ed = g.edge(e);
    if (used[ed.u] || used[ed.v]) continue;
    used[ed.u] = used[ed.v] = 1;
    acc += m;
    r.disjoint_edges.push_back(ed);
    r.disjoint_cumulative_mass.push_back(acc);
  }
}

inline LocalizationReport localization_report(const WeightedNetwork& net, std::span<const double> f, double eps,
                                              const ComponentSummary* stats = nullptr,
                                              double heavy_threshold = 0.0) {
  const auto& g = net.graph();
  require(f.size() == g.n(), Errc::invalid_parameters, "vector length must equal n");
  LocalizationReport r;
  r.eps = eps;
  r.min_support_size = min_support_size(f, eps);
  for (const auto& ed : g.edges()) r.top_edge_mass = std::max(r.top_edge_mass, f[ed.u] * f[ed.u] + f[ed.v] * f[ed.v]);
  // The edge-cover picture is only claimed for alpha < 2.
  if (net.params().alpha < 2.0) greedy_disjoint_edges(g, f, eps, r);
  if (stats) r.heavy_component_count = heavy_component_count(*stats, heavy_threshold);
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

/// floor(3 log n / b), with a relative guard so exact integers are not lost
/// to rounding (3 log n / (log n / 3) must give 9).
inline std::size_t shattering_bound(std::size_t n, double b) {
  require(b > 0, Errc::invalid_parameters, "b must be positive");
  const double x = 3.0 * std::log(static_cast<double>(n)) / b;
  return static_cast<std::size_t>(std::floor(x * (1.0 + 1e-9)));
}

inline std::size_t max_component_edges(const ComponentPartition& parts) {
  std::size_t m = 0;
  for (const auto& e : parts.edges) m = std::max(m, e.size());
  return m;
}

struct ShatteringTrial {
  std::uint64_t seed = 0;
  std::size_t max_component_edges = 0;
  std::size_t kept_edges = 0;
  bool exceeds = false;
};

struct ShatteringResult {
  std::size_t n = 0, d = 0;
  double b = 0.0;
  std::size_t bound = 0;
  std::vector<ShatteringTrial> trials;
  std::size_t exceedances = 0;
  double exceedance_frequency = 0.0;
};

/// Percolation keeps an edge with probability e^(-b) whatever alpha is, so
/// the weights are drawn with alpha = 1 and cut at |W| > b.
inline ShatteringTrial shattering_trial(std::size_t n, std::size_t d, double b, std::uint64_t trial_seed) {
  const WeibullParams w(1.0);
  const auto net = weigh(generate_regular(n, d, derive_seed(trial_seed, stream::graph)), w,
                         derive_seed(trial_seed, stream::weights));
  const auto masks = truncate(net, DecompositionParams::fixed(1.0, b));
  ShatteringTrial t;
  t.seed = trial_seed;
  t.kept_edges = static_cast<std::size_t>(std::count(masks.kept.begin(), masks.kept.end(), 1));
  t.max_component_edges = max_component_edges(components(net.graph(), masks.kept));
  return t;
}

inline ShatteringResult shattering_experiment(std::size_t n, std::size_t d, double b, std::size_t trials,
                                              std::uint64_t seed, std::size_t threads = 0) {
  check_regular_parameters(n, d);
  require(trials >= 1, Errc::invalid_parameters, "need at least one trial");
  ShatteringResult r;
  r.n = n;
  r.d = d;
  r.b = b;
  r.bound = shattering_bound(n, b);
  r.trials = parallel_map(trials, threads,
                          [&](std::size_t t) { return shattering_trial(n, d, b, derive_seed(seed, 0, t)); });
  for (auto& t : r.trials) {
    t.exceeds = t.max_component_edges > r.bound;
    r.exceedances += t.exceeds;
  }
  r.exceedance_frequency = static_cast<double>(r.exceedances) / static_cast<double>(trials);
  return r;
}

struct TransitionRecord {
  std::size_t n = 0, d = 0;
  double alpha = 0.0;
  std::size_t grid = 0, trial = 0;
  std::uint64_t seed = 0;
  double lambda1 = 0.0;
  double residual = 0.0;
  bool converged = false;
  double max_abs_weight = 0.0;
  double ratio = 0.0;          // lambda1 / (log n)^(1/alpha)
  bool max_entry_ok = false;   // lambda1 >= max|W| - residual
};

inline TransitionRecord transition_trial(std::size_t n, std::size_t d, double alpha, std::uint64_t trial_seed,
                                         const LanczosOptions& base = {}) {
  const auto net = weigh(generate_regular(n, d, derive_seed(trial_seed, stream::graph)), WeibullParams(alpha),
                         derive_seed(trial_seed, stream::weights));
  LanczosOptions opt = base;
  opt.seed = derive_seed(trial_seed, stream::solver);
  const auto eig = lambda_max(SparseSym::from_network(net), opt);
  TransitionRecord r;
  r.n = n;
  r.d = d;
  r.alpha = alpha;
  r.seed = trial_seed;
  r.lambda1 = eig.lambda;
  r.residual = eig.residual;
  r.converged = eig.converged;
  r.max_abs_weight = net.max_abs_weight();
  r.ratio = eig.lambda / std::pow(std::log(static_cast<double>(n)), 1.0 / alpha);
  r.max_entry_ok = eig.lambda >= r.max_abs_weight - eig.residual;
  return r;
}

/// Grid order: n outer, alpha inner; grid index g = i_n * |alphas| + i_alpha.
inline std::vector<TransitionRecord> transition_experiment(std::span<const std::size_t> ns, std::size_t d,
                                                           std::span<const double> alphas, std::size_t trials,
                                                           std::uint64_t seed, std::size_t threads = 0) {
  require(!ns.empty() && !alphas.empty() && trials >= 1, Errc::invalid_parameters, "empty transition grid");
  for (auto n : ns) check_regular_parameters(n, d);
  const std::size_t cells = ns.size() * alphas.size();
  return parallel_map(cells * trials, threads, [&](std::size_t k) {
    const std::size_t g = k / trials, t = k % trials;
    const std::size_t n = ns[g / alphas.size()];
    const double a = alphas[g % alphas.size()];
    auto r = transition_trial(n, d, a, derive_seed(seed, g, t));
    r.grid = g;
    r.trial = t;
    return r;
  });
}

}  // namespace wrg
