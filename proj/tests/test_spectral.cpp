#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wrg/regular_graph.hpp"
#include "wrg/spectral.hpp"
#include "wrg/weights.hpp"

using namespace wrg;
using Entry = SparseSym::Entry;

namespace {

double rayleigh(const SparseSym& M, const std::vector<double>& f) {
  std::vector<double> y(f.size());
  M.multiply(f, y);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * y[i];
  return s;
}

double norm2(const std::vector<double>& f) {
  double s = 0;
  for (double x : f) s += x * x;
  return std::sqrt(s);
}

void expect_valid_pair(const SparseSym& M, const EigenPair& p, const LanczosOptions& opt = {}) {
  EXPECT_NEAR(norm2(p.f), 1.0, 1e-12);
  double first = 0, top = 0;
  for (double x : p.f) top = std::max(top, std::abs(x));
  for (double x : p.f)
    if (std::abs(x) > 1e-8 * top) {
      first = x;
      break;
    }
  EXPECT_GT(first, 0.0);
  EXPECT_GE(rayleigh(M, p.f), p.lambda - 2 * p.residual - 1e-12);
  if (p.converged) {
    EXPECT_LE(p.residual, opt.tol * (std::abs(p.lambda) + M.gershgorin()));
  }
}

}  // namespace

TEST(SparseSym, SymmetricStorageAndZeros) {
  const std::vector<Entry> es{{0, 1, 2.0}, {1, 2, 0.0}, {2, 0, -1.0}, {0, 1, 1.0}};
  const auto M = SparseSym::from_entries(3, es);
  const auto D = M.to_dense();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(D[i * 3 + j], D[j * 3 + i]);
  EXPECT_EQ(D[0 * 3 + 1], 3.0);
  EXPECT_EQ(M.nonzeros(), 4u);  // the explicit zero is dropped
  EXPECT_TRUE(M.zero_diagonal());
  EXPECT_DOUBLE_EQ(M.gershgorin(), 4.0);
}

TEST(LambdaMax, TwoByTwo) {
  for (double w : {2.5, -0.7}) {
    const std::vector<Entry> es{{0, 1, w}};
    const auto M = SparseSym::from_entries(2, es);
    const auto p = lambda_max(M);
    EXPECT_NEAR(p.lambda, std::abs(w), 1e-12);
    EXPECT_NEAR(p.f[0], 1 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(p.f[1], (w > 0 ? 1 : -1) / std::sqrt(2.0), 1e-10);
    expect_valid_pair(M, p);
  }
}

TEST(LambdaMax, WeightedPathOnThreeVertices) {
  const double a = 1.3, b = -0.4;
  const std::vector<Entry> es{{0, 1, a}, {1, 2, b}};
  const auto M = SparseSym::from_entries(3, es);
  EXPECT_NEAR(lambda_max(M).lambda, std::hypot(a, b), 1e-12);
  EXPECT_NEAR(dense_eigs(M.to_dense(), 3).values[0], std::hypot(a, b), 1e-12);
}

TEST(LambdaMax, UnweightedRegularGraph) {
  for (std::size_t d : {3u, 4u}) {
    const auto g = generate_regular(1000, d, d);
    const auto M = SparseSym::from_network(unit_weights(g, WeibullParams(1.0)));
    const auto p = lambda_max(M);
    EXPECT_NEAR(p.lambda, static_cast<double>(d), 1e-9);
    for (double x : p.f) EXPECT_NEAR(x, 1 / std::sqrt(1000.0), 1e-6);
    EXPECT_NEAR(spectral_norm(M), static_cast<double>(d), 1e-9);
  }
}

TEST(LambdaMax, ZeroMatrixAndEmptyMatrix) {
  const auto Z = SparseSym::from_entries(4, std::vector<Entry>{});
  const auto p = lambda_max(Z);
  EXPECT_EQ(p.lambda, 0.0);
  EXPECT_EQ(p.f, (std::vector<double>{1, 0, 0, 0}));
  EXPECT_EQ(max_entry_lower_bound(Z), 0.0);
  try {
    lambda_max(SparseSym::from_entries(0, std::vector<Entry>{}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_matrix);
  }
}

TEST(LambdaMax, LargestAlgebraicNotLargestMagnitude) {
  // Eigenvalues of the star K_{1,3} with a negative diagonal shift are
  // dominated in magnitude by the negative end.
  const std::vector<Entry> es{{0, 0, -10.0}, {0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
  const auto M = SparseSym::from_entries(4, es);
  const auto dense = dense_eigs(M.to_dense(), 4);
  const auto p = lambda_max(M);
  EXPECT_NEAR(p.lambda, dense.values[0], 1e-9);
  EXPECT_LT(std::abs(dense.values[0]), std::abs(dense.values[3]));
}

TEST(DenseEigs, DiagonalAndSwap) {
  const auto d = dense_eigs({3, 0, 0, 0, -1, 0, 0, 0, 7}, 3);
  EXPECT_EQ(d.values, (std::vector<double>{7, 3, -1}));
  const auto s = dense_eigs({0, 1, 1, 0}, 2);
  EXPECT_NEAR(s.values[0], 1.0, 1e-15);
  EXPECT_NEAR(s.values[1], -1.0, 1e-15);
}

TEST(DenseEigs, SizeLimit) {
  try {
    dense_eigs(std::vector<double>(513 * 513, 0.0), 513);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::size_exceeded);
  }
}

TEST(DenseEigs, EigenvectorsReconstructMatrix) {
  Rng rng(4);
  const std::size_t n = 12;
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = rng.uniform() - 0.5;
  const auto e = dense_eigs(a, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += e.vectors[i * n + k] * e.values[k] * e.vectors[j * n + k];
      EXPECT_NEAR(s, a[i * n + j], 1e-12);
    }
}

TEST(LambdaMax, AgreesWithDenseOracleOnRandomNetworks) {
  const double alphas[] = {0.5, 1.0, 4.0};
  for (std::uint64_t k = 0; k < 100; ++k) {
    const std::size_t n = 20 + 2 * static_cast<std::size_t>(derive_seed(1, k) % 91);
    const double a = alphas[k % 3];
    const auto net = weigh(generate_regular(n, 3, derive_seed(2, k)), WeibullParams(a), derive_seed(3, k));
    const auto M = SparseSym::from_network(net);
    const auto p = lambda_max(M);
    const double ref = dense_eigs(M.to_dense(), n, false).values[0];
    ASSERT_LE(std::abs(p.lambda - ref), 1e-8 * (1 + std::abs(ref))) << "case " << k;
    expect_valid_pair(M, p);
    EXPECT_GE(p.lambda, max_entry_lower_bound(M) - p.residual);
  }
}

TEST(SpectralNorm, Examples) {
  const std::vector<Entry> es{{0, 1, -3.0}};
  EXPECT_NEAR(spectral_norm(SparseSym::from_entries(2, es)), 3.0, 1e-12);
  const auto net = weigh(generate_regular(400, 3, 5), WeibullParams(1.0), 6);
  const auto M = SparseSym::from_network(net);
  EXPECT_GE(spectral_norm(M), lambda_max(M).lambda);
}

TEST(MaxEntry, SingleEdgeAndNonzeroDiagonal) {
  const std::vector<Entry> es{{0, 1, -1.75}};
  const auto M = SparseSym::from_entries(2, es);
  EXPECT_EQ(max_entry_lower_bound(M), 1.75);
  EXPECT_NEAR(lambda_max(M).lambda, 1.75, 1e-12);
  const std::vector<Entry> diag{{0, 0, 1.0}};
  EXPECT_THROW(max_entry_lower_bound(SparseSym::from_entries(2, diag)), Error);
}

TEST(FromNetwork, MaskSelectsEdges) {
  const auto net = weigh(generate_regular(50, 3, 1), WeibullParams(1.0), 2);
  EdgeMask mask(net.graph().edge_count(), 0);
  mask[3] = 1;
  const auto M = SparseSym::from_network(net, mask);
  EXPECT_EQ(M.nonzeros(), 2u);
  EXPECT_NEAR(lambda_max(M).lambda, std::abs(net.weight(3)), 1e-12);
  EXPECT_THROW(SparseSym::from_network(net, EdgeMask(3, 1)), Error);
}

TEST(LambdaMax, DeterministicInSeed) {
  const auto net = weigh(generate_regular(2000, 3, 1), WeibullParams(2.0), 2);
  const auto M = SparseSym::from_network(net);
  const auto a = lambda_max(M), b = lambda_max(M);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.f, b.f);
  expect_valid_pair(M, a);
}
