#pragma once

// The finite-tree variational problem
//
//   K_d^(L)(gamma) = sup over u >= 0, sum(u) = 1 on the depth-L d-regular tree of
//                    ( sum over directed edges (i,j) of u_i^gamma u_j^gamma )^(1/(2 gamma)),
//
// its closed form for gamma >= 1, and the law-of-large-numbers constant
// h_d(alpha) = 2^(1/alpha) K_d(beta/2) with 1/alpha + 1/beta = 1.
//
// Every directed sum below is twice the corresponding undirected sum.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "error.hpp"
#include "regular_graph.hpp"
#include "rng.hpp"

namespace wrg {

/// Depth-L d-regular tree with breadth-first vertex numbering: root 0, level
/// l >= 1 holds d (d-1)^(l-1) vertices, children of a vertex are contiguous.
class FiniteTree {
 public:
  static constexpr std::size_t kMaxVertices = std::size_t{1} << 22;

  FiniteTree(std::size_t d, std::size_t depth) : d_(d), depth_(depth) {
    require(d >= 3, Errc::invalid_parameters, "tree degree d must be at least 3");
    offsets_.push_back(0);
    std::size_t size = 1;
    for (std::size_t l = 0; l <= depth; ++l) {
      require(offsets_.back() + size <= kMaxVertices, Errc::size_exceeded,
              "tree too large for per-vertex representation");
      offsets_.push_back(offsets_.back() + size);
      size = (l == 0) ? d : size * (d - 1);
    }
    parent_.assign(vertex_count(), 0);
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t kids = (l == 0) ? d : d - 1;
      std::size_t child = offsets_[l + 1];
      for (std::size_t p = offsets_[l]; p < offsets_[l + 1]; ++p)
        for (std::size_t k = 0; k < kids; ++k) parent_[child++] = static_cast<Vertex>(p);
    }
    edges_.reserve(vertex_count() - 1);
    for (std::size_t v = 1; v < vertex_count(); ++v)
      edges_.push_back({parent_[v], static_cast<Vertex>(v)});
  }

  std::size_t d() const { return d_; }
  std::size_t depth() const { return depth_; }
  std::size_t vertex_count() const { return offsets_.back(); }
  std::size_t level_size(std::size_t l) const { return offsets_[l + 1] - offsets_[l]; }
  std::size_t level_begin(std::size_t l) const { return offsets_[l]; }
  std::size_t level_of(std::size_t v) const {
    return static_cast<std::size_t>(std::upper_bound(offsets_.begin(), offsets_.end(), v) -
                                    offsets_.begin()) - 1;
  }
  Vertex parent(std::size_t v) const { return parent_[v]; }
  /// (parent, child) pairs in child order.
  std::span<const Edge> edges() const { return edges_; }

 private:
  std::size_t d_;
  std::size_t depth_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> parent_;
  std::vector<Edge> edges_;
};

/// 1 + d((d-1)^L - 1)/(d-2).
inline double tree_vertex_count(std::size_t d, std::size_t depth) { return tree_ball_size(d, depth); }

/// log of the number of vertices on level l.
inline double log_level_size(std::size_t d, std::size_t l) {
  if (l == 0) return 0.0;
  return std::log(static_cast<double>(d)) + static_cast<double>(l - 1) * std::log(static_cast<double>(d - 1));
}

// ---------------------------------------------------------------------------
// Objective

inline void check_simplex(std::span<const double> u, double tol = 1e-9) {
  double sum = 0.0;
  for (double x : u) {
    require(x >= -tol, Errc::simplex_violation, "negative simplex coordinate");
    sum += x;
  }
  require(std::abs(sum - 1.0) <= tol, Errc::simplex_violation, "simplex coordinates must sum to 1");
}

inline void check_gamma(double gamma) {
  require(std::isfinite(gamma) && gamma >= 0.5, Errc::invalid_parameters,
          "gamma must be at least 1/2");
}

/// sum over undirected edges of u_i^gamma u_j^gamma.
inline double undirected_edge_sum(std::span<const Edge> edges, std::span<const double> u, double gamma) {
  double s = 0.0;
  for (const auto& e : edges) s += std::pow(std::max(u[e.u], 0.0), gamma) * std::pow(std::max(u[e.v], 0.0), gamma);
  return s;
}

/// ( sum over directed edges of u_i^gamma u_j^gamma )^(1/(2 gamma)) on any graph
/// given by its edge list; u must lie on the probability simplex.
inline double objective(std::span<const Edge> edges, std::span<const double> u, double gamma) {
  check_gamma(gamma);
  check_simplex(u);
  for (const auto& e : edges)
    require(e.u < u.size() && e.v < u.size(), Errc::vertex_out_of_range, "edge endpoint outside u");
  return std::pow(2.0 * undirected_edge_sum(edges, u, gamma), 1.0 / (2.0 * gamma));
}

inline double objective(const FiniteTree& tree, std::span<const double> u, double gamma) {
  require(u.size() == tree.vertex_count(), Errc::invalid_parameters, "u must have one entry per tree vertex");
  return objective(tree.edges(), u, gamma);
}

/// Objective of the level-symmetric vector carrying mass[l] on level l
/// (each level-l vertex gets mass[l] / |level l|).
inline double level_objective(std::size_t d, std::span<const double> mass, double gamma) {
  check_gamma(gamma);
  check_simplex(mass);
  double s = 0.0;
  for (std::size_t l = 0; l + 1 < mass.size(); ++l) {
    const double lc = (1.0 - gamma) * log_level_size(d, l + 1) - gamma * log_level_size(d, l);
    s += std::exp(lc) * std::pow(std::max(mass[l], 0.0), gamma) * std::pow(std::max(mass[l + 1], 0.0), gamma);
  }
  return std::pow(2.0 * s, 1.0 / (2.0 * gamma));
}

// ---------------------------------------------------------------------------
// Projected gradient ascent on the simplex

/// Euclidean projection onto { x >= 0, sum x = 1 } (sort-based).
inline void project_to_simplex(std::span<double> x) {
  if (x.empty()) return;
  // Shift-invariant; centering on the max keeps large inputs exact enough.
  const double top = *std::max_element(x.begin(), x.end());
  for (double& v : x) v -= top;
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

namespace detail {

// G(x) = sum_e c_e x_a^gamma x_b^gamma over coordinate pairs.
struct EdgeProductProblem {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<double> coeff;
  double gamma = 1.0;

  static constexpr double kFloor = 1e-300;

  double eval(std::span<const double> x, std::vector<double>& pw) const {
    pw.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) pw[i] = std::pow(std::max(x[i], 0.0), gamma);
    double s = 0.0;
    for (std::size_t e = 0; e < pairs.size(); ++e) s += coeff[e] * pw[pairs[e].first] * pw[pairs[e].second];
    return s;
  }

  // Uses pw from the preceding eval(x).
  void gradient(std::span<const double> x, const std::vector<double>& pw, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      g[pairs[e].first] += coeff[e] * pw[pairs[e].second];
      g[pairs[e].second] += coeff[e] * pw[pairs[e].first];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (g[i] == 0.0) continue;
      // gamma x^(gamma-1), reusing pw = x^gamma away from the floor.
      g[i] *= x[i] >= 1e-200 ? gamma * pw[i] / x[i] : gamma * std::pow(std::max(x[i], kFloor), gamma - 1.0);
    }
  }
};

struct AscentResult {
  std::vector<double> x;
  double G = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline double proj_grad_norm(std::span<const double> x, std::span<const double> g, std::vector<double>& tmp) {
  tmp.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + g[i];
  project_to_simplex(tmp);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (tmp[i] - x[i]) * (tmp[i] - x[i]);
  return std::sqrt(s);
}

// Spectral projected gradient: Barzilai-Borwein trial step, non-monotone
// Armijo backtracking (reference = worst of the last kMemory values) along the
// projected direction. For gamma < 1 the step fraction stays below 1, so an
// interior start keeps every coordinate positive; the maximizer is interior
// there because the marginal gain at a zero coordinate is unbounded.
inline AscentResult ascend(const EdgeProductProblem& P, std::vector<double> x, double tol, std::size_t max_iter) {
  constexpr std::size_t kMemory = 10;
  constexpr std::size_t kStallWindow = 200;
  const double max_fraction = P.gamma < 1.0 ? 0.99 : 1.0;
  project_to_simplex(x);
  std::vector<double> pw, pw_new, g(P.dim), g_new(P.dim), dir(P.dim), x_new(P.dim), tmp;
  AscentResult r;
  double G = P.eval(x, pw);
  P.gradient(x, pw, g);
  std::vector<double> history{G};
  std::vector<double> best_x = x;
  double best_G = G;
  double checkpoint = G;
  double step = 1.0;
  for (std::size_t it = 0;; ++it) {
    r.gradient_norm = proj_grad_norm(x, g, tmp);
    r.iterations = it;
    if (r.gradient_norm <= tol) {
      r.converged = true;
      break;
    }
    if (it >= max_iter) break;
    if (it % kStallWindow == 0) {
      // Give up once a whole window adds nothing at working precision.
      if (it > 0 && best_G - checkpoint <= 1e-10 * std::abs(best_G)) break;
      checkpoint = best_G;
    }
    for (std::size_t i = 0; i < P.dim; ++i) dir[i] = x[i] + step * g[i];
    project_to_simplex(dir);
    double slope = 0.0;
    for (std::size_t i = 0; i < P.dim; ++i) {
      dir[i] -= x[i];
      slope += g[i] * dir[i];
    }
    const double reference = *std::min_element(history.begin(), history.end());
    double lambda = max_fraction, G_new = G;
    bool accepted = false;
    for (int k = 0; k < 100; ++k) {
      for (std::size_t i = 0; i < P.dim; ++i) x_new[i] = x[i] + lambda * dir[i];
      G_new = P.eval(x_new, pw_new);
      if (G_new >= reference + 1e-4 * lambda * slope) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // no ascent possible at working precision
    P.gradient(x_new, pw_new, g_new);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < P.dim; ++i) {
      const double s = x_new[i] - x[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    step = (sy < 0.0) ? ss / -sy : 1e30;
    step = std::clamp(step, 1e-30, 1e30);
    std::swap(x, x_new);
    std::swap(g, g_new);
    std::swap(pw, pw_new);
    G = G_new;
    history.push_back(G);
    if (history.size() > kMemory) history.erase(history.begin());
    if (G > best_G) {
      best_G = G;
      best_x = x;
    }
  }
  if (best_G > G) {
    // Non-monotone steps can end below the best iterate; report the best.
    x = std::move(best_x);
    G = P.eval(x, pw);
    P.gradient(x, pw, g);
    r.gradient_norm = proj_grad_norm(x, g, tmp);
    r.converged = r.gradient_norm <= tol;
  }
  r.G = G;
  r.x = std::move(x);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Solver

enum class SolveMode { automatic, full, level_reduced };

inline const char* to_string(SolveMode m) {
  switch (m) {
    case SolveMode::automatic: return "auto";
    case SolveMode::full: return "full";
    case SolveMode::level_reduced: return "level-reduced";
  }
  return "auto";
}

struct SolveOptions {
  std::size_t restarts = 16;
  double tolerance = 1e-10;       // projected-gradient norm
  std::size_t max_iter = 5000;    // per start
  SolveMode mode = SolveMode::automatic;
  std::uint64_t seed = 0;         // random Dirichlet starts
  std::size_t threads = 0;        // 0: hardware concurrency
  /// Optional extra start: per-vertex values (full) or level masses (reduced).
  std::vector<double> warm_start;
};

struct VariationalSolution {
  std::size_t d = 0;
  std::size_t depth = 0;
  double gamma = 0.0;
  double value = 0.0;            // objective at the returned point; a lower bound on K
  SolveMode mode = SolveMode::full;
  std::vector<double> u;         // full: per-vertex values; reduced: per-vertex value on each level
  std::vector<double> level_mass;  // total mass per level (both modes)
  std::size_t restarts_used = 0;
  std::size_t best_start = 0;
  std::size_t iterations = 0;    // of the winning start
  bool converged = false;
  double gradient_norm = 0.0;
};

inline bool full_mode_feasible(std::size_t d, std::size_t depth) { return depth <= 6 && d <= 5; }

namespace detail {

inline std::vector<double> dirichlet(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) s += (v = rng.exponential());
  for (double& v : x) v /= s;
  return x;
}

inline std::vector<double> normalized(std::vector<double> x) {
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= s;
  return x;
}

// Spreads level masses evenly over a full tree.
inline std::vector<double> spread_levels(const FiniteTree& t, std::span<const double> mass) {
  std::vector<double> u(t.vertex_count(), 0.0);
  for (std::size_t l = 0; l <= t.depth() && l < mass.size(); ++l)
    for (std::size_t k = 0; k < t.level_size(l); ++k)
      u[t.level_begin(l) + k] = mass[l] / static_cast<double>(t.level_size(l));
  return u;
}

// Structured level-mass profiles on levels 0..L.
inline std::vector<std::vector<double>> level_profiles(std::size_t d, std::size_t L) {
  std::vector<std::vector<double>> out;
  const std::size_t n = L + 1;
  auto geometric = [&](double r) {
    std::vector<double> m(n);
    for (std::size_t l = 0; l < n; ++l) m[l] = std::pow(r, static_cast<double>(l));
    return normalized(std::move(m));
  };
  // Uniform per vertex.
  {
    std::vector<double> m(n);
    for (std::size_t l = 0; l < n; ++l) m[l] = std::exp(log_level_size(d, l) - log_level_size(d, L));
    out.push_back(normalized(std::move(m)));
  }
  // Star: root 1/2, level one 1/2.
  {
    std::vector<double> m(n, 0.0);
    m[0] = 0.5;
    m[1] = 0.5;
    out.push_back(m);
  }
  // Equal mass on levels 0..L and on 0..L-1 (the 1/L construction).
  out.push_back(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  {
    std::vector<double> m(n, 1.0 / static_cast<double>(L));
    m[L] = 0.0;
    out.push_back(m);
  }
  out.push_back(geometric(0.5));
  out.push_back(geometric(0.8));
  out.push_back(geometric(1.25));
  return out;
}

inline VariationalSolution run_starts(const EdgeProductProblem& P, std::vector<std::vector<double>> starts,
                                      const SolveOptions& opt, double gamma) {
  std::vector<AscentResult> results(starts.size());
  auto work = [&](std::size_t k) {
    auto& x0 = starts[k];
    if (gamma < 1.0 && *std::min_element(x0.begin(), x0.end()) <= 0.0) {
      // Interior start: with gamma < 1 the gradient is unbounded at zero
      // coordinates. Lifting only the zeros keeps a good warm start good.
      const double eps = 1e-12 / static_cast<double>(x0.size());
      for (double& v : x0) v = std::max(v, eps);
      x0 = normalized(std::move(x0));
    }
    results[k] = ascend(P, std::move(x0), opt.tolerance, opt.max_iter);
  };
  std::size_t threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, starts.size());
  // Tiny problems are not worth a thread each.
  if (P.dim * P.pairs.size() < 4096) threads = 1;
  if (threads <= 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < starts.size();) work(k);
      });
    for (auto& th : pool) th.join();
  }
  VariationalSolution best;
  best.gamma = gamma;
  best.value = -1.0;
  double best_G = -1.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    auto& r = results[k];
    if (r.G > best_G) {  // strict: ties go to the lowest start index
      best_G = r.G;
      best.u = std::move(r.x);
      best.best_start = k;
      best.iterations = r.iterations;
      best.converged = r.converged;
      best.gradient_norm = r.gradient_norm;
    }
  }
  best.restarts_used = starts.size();
  return best;
}

}  // namespace detail

/// Multi-start maximization of the directed edge-product objective over the
/// simplex on an arbitrary graph (edge list over vertices 0..n-1).
inline VariationalSolution maximize_on_graph(std::span<const Edge> edges, std::size_t n, double gamma,
                                             const SolveOptions& opt = {}) {
  check_gamma(gamma);
  require(n >= 2 && !edges.empty(), Errc::invalid_parameters, "graph needs at least one edge");
  detail::EdgeProductProblem P;
  P.dim = n;
  P.gamma = gamma;
  for (const auto& e : edges) {
    require(e.u < n && e.v < n, Errc::vertex_out_of_range, "edge endpoint out of range");
    P.pairs.emplace_back(e.u, e.v);
    P.coeff.push_back(1.0);
  }
  std::vector<std::vector<double>> starts;
  if (!opt.warm_start.empty()) {
    require(opt.warm_start.size() == n, Errc::invalid_parameters, "warm start has wrong length");
    starts.push_back(opt.warm_start);
  }
  starts.emplace_back(n, 1.0 / static_cast<double>(n));
  for (const auto& e : edges) {
    if (starts.size() >= opt.restarts) break;
    std::vector<double> x(n, 0.0);
    x[e.u] = x[e.v] = 0.5;
    starts.push_back(std::move(x));
  }
  Rng rng(opt.seed);
  while (starts.size() < opt.restarts) starts.push_back(detail::dirichlet(n, rng));
  auto sol = detail::run_starts(P, std::move(starts), opt, gamma);
  sol.mode = SolveMode::full;
  sol.value = objective(edges, sol.u, gamma);
  return sol;
}

/// K_d^(L)(gamma) by projected gradient ascent. Full mode optimizes every
/// vertex of the tree; level-reduced mode optimizes one mass per level and
/// assumes the maximizer is constant on levels. The returned value is the
/// objective at a feasible point, hence a lower bound on K_d^(L)(gamma).
inline VariationalSolution solve_kdl(std::size_t d, std::size_t L, double gamma, const SolveOptions& opt = {}) {
  require(d >= 3, Errc::invalid_parameters, "d must be at least 3");
  require(L >= 1, Errc::invalid_parameters, "depth L must be at least 1");
  check_gamma(gamma);
  require(opt.restarts >= 1, Errc::invalid_parameters, "need at least one start");
  SolveMode mode = opt.mode;
  if (mode == SolveMode::automatic) mode = full_mode_feasible(d, L) ? SolveMode::full : SolveMode::level_reduced;

  const std::uint64_t seed = derive_seed(opt.seed, d * 1000003u + L);
  Rng rng(seed);
  const auto profiles = detail::level_profiles(d, L);
  VariationalSolution sol;

  if (mode == SolveMode::full) {
    const FiniteTree tree(d, L);
    const std::size_t N = tree.vertex_count();
    detail::EdgeProductProblem P;
    P.dim = N;
    P.gamma = gamma;
    for (const auto& e : tree.edges()) {
      P.pairs.emplace_back(e.u, e.v);
      P.coeff.push_back(1.0);
    }
    std::vector<std::vector<double>> starts;
    // Single edge at the root, then a single edge one level down.
    {
      std::vector<double> x(N, 0.0);
      x[0] = x[1] = 0.5;
      starts.push_back(std::move(x));
    }
    for (const auto& m : profiles) starts.push_back(detail::spread_levels(tree, m));
    if (L >= 2) {
      std::vector<double> x(N, 0.0);
      x[1] = x[tree.level_begin(2)] = 0.5;
      starts.push_back(std::move(x));
    }
    while (starts.size() < opt.restarts) starts.push_back(detail::dirichlet(N, rng));
    starts.resize(opt.restarts);
    // Start from the level-symmetric optimum so full mode matches or beats
    // level-reduced mode.
    {
      SolveOptions ro = opt;
      ro.mode = SolveMode::level_reduced;
      ro.warm_start.clear();
      starts.insert(starts.begin(), detail::spread_levels(tree, solve_kdl(d, L, gamma, ro).level_mass));
    }
    if (!opt.warm_start.empty()) {
      require(opt.warm_start.size() <= N, Errc::invalid_parameters, "warm start longer than tree");
      std::vector<double> w(N, 0.0);
      std::copy(opt.warm_start.begin(), opt.warm_start.end(), w.begin());
      starts.insert(starts.begin(), detail::normalized(std::move(w)));
    }
    sol = detail::run_starts(P, std::move(starts), opt, gamma);
    sol.mode = SolveMode::full;
    sol.value = objective(tree, sol.u, gamma);
    sol.level_mass.assign(L + 1, 0.0);
    for (std::size_t v = 0; v < N; ++v) sol.level_mass[tree.level_of(v)] += sol.u[v];
  } else {
    detail::EdgeProductProblem P;
    P.dim = L + 1;
    P.gamma = gamma;
    for (std::size_t l = 0; l < L; ++l) {
      P.pairs.emplace_back(static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(l + 1));
      P.coeff.push_back(std::exp((1.0 - gamma) * log_level_size(d, l + 1) - gamma * log_level_size(d, l)));
    }
    std::vector<std::vector<double>> starts;
    for (const auto& m : profiles) starts.push_back(m);
    if (L >= 2) {
      std::vector<double> m(L + 1, 0.0);
      m[L / 2] = m[L / 2 + 1] = 0.5;
      starts.push_back(std::move(m));
    }
    while (starts.size() < opt.restarts) starts.push_back(detail::dirichlet(L + 1, rng));
    starts.resize(opt.restarts);
    // The depth L-1 optimum, padded with an empty last level, is feasible with
    // the same value; starting there keeps the value nondecreasing in L.
    if (L >= 2) {
      SolveOptions po = opt;
      po.mode = SolveMode::level_reduced;
      po.warm_start.clear();
      auto m = solve_kdl(d, L - 1, gamma, po).level_mass;
      m.push_back(0.0);
      starts.insert(starts.begin(), std::move(m));
    }
    if (!opt.warm_start.empty()) {
      require(opt.warm_start.size() <= L + 1, Errc::invalid_parameters, "warm start longer than depth");
      std::vector<double> w(L + 1, 0.0);
      std::copy(opt.warm_start.begin(), opt.warm_start.end(), w.begin());
      starts.insert(starts.begin(), detail::normalized(std::move(w)));
    }
    sol = detail::run_starts(P, std::move(starts), opt, gamma);
    sol.mode = SolveMode::level_reduced;
    sol.level_mass = sol.u;
    sol.value = level_objective(d, sol.level_mass, gamma);
    for (std::size_t l = 0; l <= L; ++l) sol.u[l] = sol.level_mass[l] * std::exp(-log_level_size(d, l));
  }
  sol.d = d;
  sol.depth = L;
  sol.gamma = gamma;
  return sol;
}

// ---------------------------------------------------------------------------
// Closed forms and bounds

/// K_d^(L)(gamma) = K_d(gamma) = 2^(1/(2 gamma) - 1) for gamma >= 1.
inline double kd_closed_form(double gamma) {
  require(gamma >= 1.0, Errc::domain_error, "closed form holds only for gamma >= 1");
  return std::pow(2.0, 1.0 / (2.0 * gamma) - 1.0);
}

/// d^((alpha-2)/(2 alpha)): the best value reachable by vectors supported on
/// the root and its children.
inline double star_bound(std::size_t d, double alpha) {
  require(alpha > 2.0, Errc::domain_error, "star bound needs alpha > 2");
  return std::pow(static_cast<double>(d), (alpha - 2.0) / (2.0 * alpha));
}

struct HalfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds at gamma = 1/2 on the undirected edge sum sum_E sqrt(u_i u_j) over
/// the depth-L tree, which equals K_d^(L)(1/2) / 2: the equal-mass-per-level
/// construction gives (sqrt(d) + (L-2) sqrt(d-1)) / L, and sqrt(d-1) is the
/// infinite-tree ceiling.
inline HalfBounds kdl_half_bounds(std::size_t d, std::size_t L) {
  require(d >= 3, Errc::domain_error, "d must be at least 3");
  require(L >= 2, Errc::domain_error, "depth L must be at least 2");
  const double dd = static_cast<double>(d);
  return {(std::sqrt(dd) + static_cast<double>(L - 2) * std::sqrt(dd - 1.0)) / static_cast<double>(L),
          std::sqrt(dd - 1.0)};
}

/// Conjugate exponent beta with 1/alpha + 1/beta = 1.
inline double conjugate(double alpha) { return alpha / (alpha - 1.0); }

struct HdRow {
  std::size_t depth = 0;
  double kd = 0.0;     // solve_kdl value
  double value = 0.0;  // 2^(1/alpha) kd
  SolveMode mode = SolveMode::full;
  bool converged = false;
};

struct HdResult {
  std::size_t d = 0;
  double alpha = 0.0;
  double gamma = 0.0;   // beta / 2
  double value = 0.0;   // max over the table; lower bound on h_d(alpha)
  bool exact = false;   // alpha <= 2
  std::vector<HdRow> table;
};

struct HdOptions {
  std::size_t max_depth = 12;
  SolveOptions solver{};
};

/// h_d(alpha): exactly 1 for 1 < alpha <= 2; for alpha > 2 the best of
/// 2^(1/alpha) K_d^(L)(beta/2) over L = 1..max_depth, each depth warm-started
/// from the previous one (full mode while feasible, level-reduced after).
inline HdResult h_d(std::size_t d, double alpha, const HdOptions& opt = {}) {
  require(std::isfinite(alpha) && alpha > 1.0, Errc::domain_error, "h_d needs alpha > 1");
  require(d >= 3, Errc::invalid_parameters, "d must be at least 3");
  require(opt.max_depth >= 1, Errc::invalid_parameters, "max depth must be at least 1");
  HdResult r;
  r.d = d;
  r.alpha = alpha;
  r.gamma = conjugate(alpha) / 2.0;
  if (alpha <= 2.0) {
    r.value = 1.0;
    r.exact = true;
    return r;
  }
  const double scale = std::pow(2.0, 1.0 / alpha);
  std::vector<double> full_warm, level_warm;
  for (std::size_t L = 1; L <= opt.max_depth; ++L) {
    SolveOptions so = opt.solver;
    const bool full = so.mode == SolveMode::full ||
                      (so.mode == SolveMode::automatic && full_mode_feasible(d, L));
    so.mode = full ? SolveMode::full : SolveMode::level_reduced;
    so.warm_start = full ? full_warm : level_warm;
    const auto s = solve_kdl(d, L, r.gamma, so);
    if (full) full_warm = s.u;
    level_warm = s.level_mass;
    HdRow row{L, s.value, scale * s.value, s.mode, s.converged};
    r.table.push_back(row);
    r.value = std::max(r.value, row.value);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Near-maximizer certificate

struct NearMaximizerResult {
  std::optional<Edge> edge;       // edge with both endpoints >= 1/2 - c sqrt(eps)
  Edge best_edge{};               // edge maximizing min(u_i, u_j)
  double best_min = 0.0;
  double objective = 0.0;
  double threshold = 0.0;         // (1 - eps) 2^(1/(2 gamma) - 1)
  bool hypothesis_met = false;
};

/// When the objective reaches (1 - eps) of the gamma > 1 maximum, looks for an
/// edge whose endpoints both carry at least 1/2 - c sqrt(eps).
inline NearMaximizerResult near_maximizer_edge(std::span<const Edge> edges, std::span<const double> u,
                                               double gamma, double eps, double c = 5.0) {
  require(gamma > 1.0, Errc::domain_error, "near-maximizer structure needs gamma > 1");
  require(eps > 0.0 && eps < 1.0, Errc::invalid_parameters, "eps must lie in (0,1)");
  require(!edges.empty(), Errc::invalid_parameters, "graph has no edges");
  NearMaximizerResult r;
  r.objective = objective(edges, u, gamma);
  r.threshold = (1.0 - eps) * kd_closed_form(gamma);
  r.hypothesis_met = r.objective >= r.threshold;
  r.best_min = -1.0;
  for (const auto& e : edges) {
    const double m = std::min(u[e.u], u[e.v]);
    if (m > r.best_min) {
      r.best_min = m;
      r.best_edge = e;
    }
  }
  if (r.hypothesis_met && r.best_min >= 0.5 - c * std::sqrt(eps)) r.edge = r.best_edge;
  return r;
}

}  // namespace wrg
