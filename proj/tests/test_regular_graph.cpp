#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "wrg/regular_graph.hpp"

using namespace wrg;

namespace {

void expect_regular(const RegularGraph& g) {
  ASSERT_EQ(g.edge_count(), g.n() * g.d() / 2);
  std::set<std::pair<Vertex, Vertex>> seen;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto ed = g.edge(e);
    ASSERT_LT(ed.u, ed.v);
    if (e > 0) {
      ASSERT_LT(g.edge(e - 1), ed);
    }
    ASSERT_TRUE(seen.emplace(ed.u, ed.v).second);
    ASSERT_EQ(g.edge_id(ed.u, ed.v), std::optional<EdgeId>(e));
    ASSERT_EQ(g.edge_id(ed.v, ed.u), std::optional<EdgeId>(e));
  }
  for (Vertex v = 0; v < g.n(); ++v) {
    const auto nb = g.neighbors(v);
    ASSERT_EQ(nb.size(), g.d());
    ASSERT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    ASSERT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
    for (Vertex w : nb) {
      ASSERT_NE(w, v);
      const auto back = g.neighbors(w);
      ASSERT_TRUE(std::binary_search(back.begin(), back.end(), v));
    }
  }
}

RegularGraph k4() { return generate_regular(4, 3, 0); }

// Cycle on n vertices as a 2-regular graph.
RegularGraph cycle(std::size_t n) {
  std::vector<Edge> es;
  for (std::size_t i = 0; i < n; ++i)
    es.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)});
  return RegularGraph::from_edges(n, 2, es);
}

}  // namespace

TEST(RegularGraph, GeneratedGraphsSatisfyInvariants) {
  for (std::size_t n : {10u, 50u, 1000u})
    for (std::size_t d : {3u, 4u, 5u}) {
      if (n * d % 2) continue;
      expect_regular(generate_regular(n, d, 1234 + n + d));
    }
}

TEST(RegularGraph, FourVerticesDegreeThreeIsAlwaysK4) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto g = generate_regular(4, 3, s);
    ASSERT_EQ(g.edge_count(), 6u);
    for (Vertex u = 0; u < 4; ++u)
      for (Vertex v = u + 1; v < 4; ++v) EXPECT_TRUE(g.edge_id(u, v).has_value());
  }
}

TEST(RegularGraph, InvalidParametersAreRejected) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io_error;
  };
  EXPECT_EQ(code([] { generate_regular(5, 3, 0); }), Errc::invalid_parameters);
  EXPECT_EQ(code([] { generate_regular(3, 3, 0); }), Errc::invalid_parameters);
  EXPECT_EQ(code([] { generate_regular(0, 3, 0); }), Errc::invalid_parameters);
  EXPECT_EQ(code([] { generate_regular(1000, 3, 0, 0); }), Errc::retry_budget_exceeded);
  EXPECT_EQ(code([] { RegularGraph::from_edges(4, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 3}}); }),
            Errc::invalid_parameters);
  EXPECT_EQ(code([] { RegularGraph::from_edges(4, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 7}}); }),
            Errc::vertex_out_of_range);
}

TEST(RegularGraph, GenerationIsDeterministicInSeed) {
  const auto a = generate_regular(200, 3, 99), b = generate_regular(200, 3, 99),
             c = generate_regular(200, 3, 100);
  EXPECT_TRUE(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end()));
  EXPECT_FALSE(std::equal(a.edges().begin(), a.edges().end(), c.edges().begin(), c.edges().end()));
}

TEST(RegularGraph, EnumerationOracleCountsCubicGraphsOnSixVertices) {
  const auto all = oracle::enumerate_regular(6, 3);
  EXPECT_EQ(all.size(), 70u);
  // Every enumerated edge set is accepted as a valid graph.
  for (const auto& es : all) {
    std::vector<Edge> edges;
    for (auto [u, v] : es) edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    expect_regular(RegularGraph::from_edges(6, 3, edges));
  }
}

TEST(RegularGraph, GeneratedSixVertexGraphsCoverTheEnumeration) {
  std::set<std::vector<Edge>> oracle_set;
  for (const auto& es : oracle::enumerate_regular(6, 3)) {
    std::vector<Edge> edges;
    for (auto [u, v] : es) edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    oracle_set.insert(edges);
  }
  std::set<std::vector<Edge>> seen;
  for (std::uint64_t s = 0; s < 3000; ++s) {
    const auto g = generate_regular(6, 3, derive_seed(5, s));
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    ASSERT_TRUE(oracle_set.count(edges));
    seen.insert(edges);
  }
  EXPECT_EQ(seen.size(), oracle_set.size());
}

TEST(RegularGraph, PairingAcceptanceRateIsInSanityBand) {
  Rng rng(2024);
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) accepted += pairing_attempt(100, 3, rng, 0).has_value();
  const double rate = accepted / 10000.0;
  EXPECT_GE(rate, 0.05);
  EXPECT_LE(rate, 0.60);
}

TEST(Ball, K4Examples) {
  const auto g = k4();
  const auto b0 = ball(g, 0, 0);
  EXPECT_EQ(b0.report.vertex_count, 1u);
  EXPECT_EQ(b0.report.edge_count, 0u);
  EXPECT_EQ(b0.report.excess, 0u);
  EXPECT_FALSE(b0.report.contains_cycle);
  const auto b1 = ball(g, 0, 1);
  EXPECT_EQ(b1.report.vertex_count, 4u);
  EXPECT_EQ(b1.report.edge_count, 6u);
  EXPECT_EQ(b1.report.excess, 3u);
  EXPECT_TRUE(b1.report.contains_cycle);
  EXPECT_EQ(b1.vertices.front(), 0u);
}

TEST(Ball, RootOutOfRangeThrows) {
  const auto g = k4();
  EXPECT_THROW(ball(g, 4, 1), Error);
}

TEST(Ball, TreeBallHasNoExcess) {
  // Radius below half the girth of a long cycle never closes a loop.
  const auto g = cycle(20);
  for (std::size_t r = 0; r < 10; ++r) {
    const auto b = ball(g, 3, r);
    EXPECT_EQ(b.report.excess, 0u);
    EXPECT_FALSE(b.report.contains_cycle);
    EXPECT_EQ(b.report.vertex_count, 2 * r + 1);
  }
  EXPECT_TRUE(ball(g, 3, 10).report.contains_cycle);
}

TEST(Ball, ReportsAreConsistentAndMonotoneInRadius) {
  const auto g = generate_regular(300, 3, 8);
  for (Vertex v : {0u, 17u, 299u}) {
    std::vector<Vertex> prev;
    std::size_t prev_excess = 0;
    for (std::size_t r = 0; r <= 6; ++r) {
      const auto b = ball(g, v, r);
      const auto& rep = b.report;
      EXPECT_EQ(rep.vertex_count, b.vertices.size());
      EXPECT_EQ(rep.edge_count, b.edges.size());
      EXPECT_EQ(rep.excess, rep.edge_count + 1 - rep.vertex_count);
      EXPECT_EQ(rep.contains_cycle, rep.excess >= 1);
      EXPECT_LE(static_cast<double>(rep.vertex_count), tree_ball_size(3, r));
      EXPECT_GE(rep.excess, prev_excess);
      std::vector<Vertex> cur = b.vertices;
      std::sort(cur.begin(), cur.end());
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
      prev_excess = rep.excess;
    }
  }
}

TEST(Ball, TreeBallSizeFormula) {
  for (std::size_t d : {3u, 4u, 7u})
    for (std::size_t r = 0; r < 8; ++r) {
      const double dd = static_cast<double>(d);
      EXPECT_DOUBLE_EQ(tree_ball_size(d, r), 1 + dd * (std::pow(dd - 1, static_cast<double>(r)) - 1) / (dd - 2));
    }
}

TEST(Census, K4EveryBallIsK4) {
  const auto c = census(k4(), 1);
  EXPECT_EQ(c.max_excess, 3u);
  EXPECT_EQ(c.cyclic_vertex_count, 4u);
}

TEST(Census, MaskedSpanningTreeIsAcyclic) {
  const auto g = generate_regular(200, 3, 4);
  // Keep a BFS spanning forest only.
  EdgeMask mask(g.edge_count(), 0);
  std::vector<char> seen(g.n(), 0);
  for (Vertex s = 0; s < g.n(); ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    std::vector<Vertex> q{s};
    for (std::size_t h = 0; h < q.size(); ++h)
      for (Vertex w : g.neighbors(q[h]))
        if (!seen[w]) {
          seen[w] = 1;
          mask[*g.edge_id(q[h], w)] = 1;
          q.push_back(w);
        }
  }
  const auto c = census(g, 4, mask);
  EXPECT_EQ(c.max_excess, 0u);
  EXPECT_EQ(c.cyclic_vertex_count, 0u);
}

TEST(Census, RadiusZeroAndBadMaskAreRejected) {
  const auto g = k4();
  EXPECT_THROW(census(g, 0), Error);
  EdgeMask short_mask(3, 1);
  try {
    census(g, 1, short_mask);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::mask_length_mismatch);
  }
}

TEST(Census, DefaultRadius) {
  EXPECT_EQ(default_census_radius(100000, 3), 3u);  // floor(0.2 * log2(1e5)) = floor(3.32)
  EXPECT_EQ(default_census_radius(10, 3), 1u);
}

TEST(Census, CyclicCountStaysBelowBoundAtScale) {
  const std::size_t n = 100000, d = 3, R = default_census_radius(n, d);
  const double bound = std::pow(static_cast<double>(d - 1), 4.0 * static_cast<double>(R));
  int within = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const auto g = generate_regular(n, d, derive_seed(77, 0, static_cast<std::uint64_t>(t)));
    const auto c = census(g, R);
    EXPECT_LE(c.cyclic_vertex_count, n);
    within += static_cast<double>(c.cyclic_vertex_count) <= bound;
  }
  EXPECT_GE(within, 48);  // at least 95% of 50
}

TEST(Components, AllTrueAndAllFalseMasks) {
  const auto g = generate_regular(100, 3, 1);
  const auto none = components(g, EdgeMask(g.edge_count(), 0));
  EXPECT_EQ(none.count(), g.n());
  for (const auto& es : none.edges) EXPECT_TRUE(es.empty());
  const auto k = components(k4(), EdgeMask(6, 1));
  EXPECT_EQ(k.count(), 1u);
  EXPECT_EQ(k.edges[0].size(), 6u);
}

TEST(Components, MaskLengthMismatchThrows) {
  try {
    components(k4(), EdgeMask(5, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::mask_length_mismatch);
  }
}

TEST(Components, MatchDfsOracleOnSmallGraphs) {
  Rng rng(31337);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t d = 3 + rng.below(2);
    std::size_t n = d + 1 + rng.below(12 - d);
    if (n * d % 2) ++n;
    if (n > 12) n -= 2;
    const auto g = generate_regular(n, d, rng.next());
    EdgeMask mask(g.edge_count());
    oracle::EdgeList kept;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      mask[e] = rng.below(2);
      if (mask[e]) kept.emplace_back(g.edge(e).u, g.edge(e).v);
    }
    const auto p = components(g, mask);
    const auto ref = oracle::dfs_components(static_cast<int>(n), kept);
    ASSERT_EQ(p.count(), static_cast<std::size_t>(*std::max_element(ref.begin(), ref.end()) + 1));
    for (Vertex v = 0; v < n; ++v) ASSERT_EQ(p.label[v], static_cast<std::uint32_t>(ref[v]));

    std::size_t covered = 0, edge_total = 0;
    for (std::size_t k = 0; k < p.count(); ++k) {
      covered += p.vertices[k].size();
      edge_total += p.edges[k].size();
      EXPECT_GE(p.edges[k].size() + 1, p.vertices[k].size());
      for (EdgeId e : p.edges[k]) {
        EXPECT_TRUE(mask[e]);
        EXPECT_EQ(p.label[g.edge(e).u], k);
      }
    }
    EXPECT_EQ(covered, n);
    EXPECT_EQ(edge_total, kept.size());
  }
}
