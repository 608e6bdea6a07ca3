#pragma once

// Symmetric Weibull edge weights with the exact tail P(|W| >= t) = exp(-t^alpha)
// for every t >= 0, so |W|^alpha is a unit exponential and sign(W) is an
// independent fair sign.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "regular_graph.hpp"
#include "rng.hpp"

namespace wrg {

struct WeibullParams {
  double alpha = 1.0;

  explicit WeibullParams(double shape = 1.0) : alpha(shape) {
    require(std::isfinite(shape) && shape > 0.0, Errc::invalid_parameters,
            "Weibull shape alpha must be positive");
  }
};

/// Inverse-CDF map: magnitude (b - log u)^(1/alpha) for uniform u in (0,1).
inline double weibull_magnitude(double alpha, double u, double b = 0.0) {
  return std::pow(b - std::log(u), 1.0 / alpha);
}

inline double sample_weight(const WeibullParams& p, Rng& rng) {
  const double magnitude = weibull_magnitude(p.alpha, rng.uniform_open());
  return rng.sign() * magnitude;
}

/// Weight conditioned on |W| > b^(1/alpha): |W|^alpha = b + Exp(1).
inline double sample_conditioned(const WeibullParams& p, double b, Rng& rng) {
  require(b >= 0.0, Errc::invalid_parameters, "conditioning level b must be >= 0");
  const double magnitude = weibull_magnitude(p.alpha, rng.uniform_open(), b);
  return rng.sign() * magnitude;
}

/// A regular graph with one weight per canonical edge; X_ij = A_ij W_ij.
class WeightedNetwork {
 public:
  WeightedNetwork(RegularGraph graph, std::vector<double> weights, WeibullParams params,
                  std::uint64_t seed)
      : graph_(std::move(graph)), weights_(std::move(weights)), params_(params), seed_(seed) {
    require(weights_.size() == graph_.edge_count(), Errc::invalid_parameters,
            "one weight per edge required");
  }

  const RegularGraph& graph() const { return graph_; }
  std::span<const double> weights() const { return weights_; }
  double weight(EdgeId e) const { return weights_[e]; }
  const WeibullParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  double max_abs_weight() const {
    double m = 0.0;
    for (double w : weights_) m = std::max(m, std::abs(w));
    return m;
  }

 private:
  RegularGraph graph_;
  std::vector<double> weights_;
  WeibullParams params_;
  std::uint64_t seed_;
};

/// Draws i.i.d. weights in canonical edge order from one stream seeded by `seed`.
inline WeightedNetwork weigh(RegularGraph graph, const WeibullParams& params,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(graph.edge_count());
  for (double& x : w) x = sample_weight(params, rng);
  return WeightedNetwork(std::move(graph), std::move(w), params, seed);
}

/// Same graph, every weight set to 1 (the unweighted adjacency matrix).
inline WeightedNetwork unit_weights(RegularGraph graph, const WeibullParams& params) {
  std::vector<double> w(graph.edge_count(), 1.0);
  return WeightedNetwork(std::move(graph), std::move(w), params, 0);
}

// ---------------------------------------------------------------------------
// Tail of sums of conditioned weights

struct TailBoundQuery {
  std::size_t m = 1;   // number of summands
  double L = 2.0;      // threshold, L > m
  double b = 2.0;      // conditioning level, b > 1
  double C = 1.0;      // tail constant, C >= 1
};

/// (C L / m)^m * exp(-L + m + m b), evaluated in log space.
inline double weibull_sum_bound(const TailBoundQuery& q) {
  const double m = static_cast<double>(q.m);
  require(q.m >= 1, Errc::domain_error, "m must be positive");
  require(q.L > m, Errc::domain_error, "threshold L must exceed m");
  require(q.b > 1.0, Errc::domain_error, "conditioning level b must exceed 1");
  require(q.C >= 1.0, Errc::domain_error, "tail constant C must be >= 1");
  return std::exp(m * std::log(q.C * q.L / m) - q.L + m + m * q.b);
}

struct TailEstimate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0;   // Wilson 99%
  double ci_high = 0.0;
};

inline constexpr double kZ99 = 2.5758293035489004;  // standard normal 0.995 quantile

inline TailEstimate wilson_interval(std::size_t hits, std::size_t trials, double z = kZ99) {
  TailEstimate t;
  t.trials = trials;
  t.hits = hits;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  t.estimate = p;
  t.ci_low = std::max(0.0, centre - half);
  t.ci_high = std::min(1.0, centre + half);
  return t;
}

/// Monte Carlo estimate of P(|Y_1|^alpha + ... + |Y_m|^alpha >= L) for i.i.d.
/// weights conditioned on |Y| > b^(1/alpha).
inline TailEstimate mc_sum_tail(double alpha, std::size_t m, double L, double b,
                                std::size_t trials, std::uint64_t seed) {
  require(trials >= 10000, Errc::invalid_parameters, "mc_sum_tail needs at least 1e4 trials");
  require(m >= 1, Errc::invalid_parameters, "m must be positive");
  const WeibullParams p(alpha);
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::pow(std::abs(sample_conditioned(p, b, rng)), alpha);
    if (sum >= L) ++hits;
  }
  return wilson_interval(hits, trials);
}

}  // namespace wrg
