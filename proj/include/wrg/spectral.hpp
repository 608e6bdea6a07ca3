#pragma once

// Largest algebraic eigenpair of sparse symmetric matrices, plus a dense
// cyclic-Jacobi solver used as a verification oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace wrg {

/// Compressed symmetric matrix; both (i,j) and (j,i) are stored.
class SparseSym {
 public:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  SparseSym() = default;

  /// Each entry sets (row, col) and (col, row); duplicates are summed and
  /// exact zeros dropped.
  static SparseSym from_entries(std::size_t n, std::span<const Entry> upper) {
    std::vector<Entry> all;
    all.reserve(2 * upper.size());
    for (const auto& e : upper) {
      require(e.row < n && e.col < n, Errc::vertex_out_of_range, "matrix index out of range");
      all.push_back(e);
      if (e.row != e.col) all.push_back({e.col, e.row, e.value});
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseSym m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    for (std::size_t k = 0; k < all.size();) {
      std::size_t j = k;
      double v = 0.0;
      while (j < all.size() && all[j].row == all[k].row && all[j].col == all[k].col) v += all[j++].value;
      if (v != 0.0) {
        m.col_.push_back(all[k].col);
        m.val_.push_back(v);
        ++m.row_ptr_[all[k].row + 1];
      }
      k = j;
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
  }

  /// X = A ⊙ W restricted to the edges with a nonzero mask flag (all edges
  /// when the mask is empty).
  static SparseSym from_network(const WeightedNetwork& net, std::span<const std::uint8_t> mask = {}) {
    const auto& g = net.graph();
    require(mask.empty() || mask.size() == g.edge_count(), Errc::mask_length_mismatch,
            "mask length must equal edge count");
    SparseSym m;
    m.n_ = g.n();
    m.row_ptr_.assign(g.n() + 1, 0);
    m.col_.reserve(2 * g.edge_count());
    m.val_.reserve(2 * g.edge_count());
    for (Vertex v = 0; v < g.n(); ++v) {
      const auto nb = g.neighbors(v);
      const auto inc = g.incident(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (!mask.empty() && !mask[inc[k]]) continue;
        const double w = net.weight(inc[k]);
        if (w == 0.0) continue;
        m.col_.push_back(nb[k]);
        m.val_.push_back(w);
      }
      m.row_ptr_[v + 1] = m.col_.size();
    }
    return m;
  }

  std::size_t dim() const { return n_; }
  std::size_t nonzeros() const { return val_.size(); }

  SparseSym negated() const {
    SparseSym m = *this;
    for (double& v : m.val_) v = -v;
    return m;
  }

  /// y = (M + shift I) x
  void multiply(std::span<const double> x, std::span<double> y, double shift = 0.0) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = shift * x[i];
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
      y[i] = s;
    }
  }

  /// Gershgorin radius max_i sum_j |M_ij|.
  double gershgorin() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(val_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  /// max |M_ij| over off-diagonal entries.
  double max_abs_offdiag() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (col_[k] != i) best = std::max(best, std::abs(val_[k]));
    return best;
  }

  bool zero_diagonal() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (col_[k] == i) return false;
    return true;
  }

  /// Dense row-major copy (tests and small problems).
  std::vector<double> to_dense() const {
    std::vector<double> a(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a[i * n_ + col_[k]] = val_[k];
    return a;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
};

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver (cyclic Jacobi)

struct DenseEigen {
  std::size_t n = 0;
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // column k (row-major n x n) pairs with values[k]
  std::size_t sweeps = 0;
};

inline constexpr std::size_t kDenseLimit = 512;

/// All eigenpairs of a dense symmetric matrix (row-major), n <= 512. Sweeps
/// until the off-diagonal Frobenius norm is <= 1e-12 * ||M||_F.
inline DenseEigen dense_eigs(std::vector<double> a, std::size_t n, bool want_vectors = true) {
  require(n <= kDenseLimit, Errc::size_exceeded, "dense_eigs supports n <= 512");
  require(a.size() == n * n, Errc::invalid_parameters, "matrix must be n x n");
  DenseEigen out;
  out.n = n;
  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double target = 1e-12 * frob;

  for (std::size_t sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) <= target) break;
    out.sweeps = sweep + 1;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k * n + p];
            const double vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return at(x, x) > at(y, y); });
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = at(order[k], order[k]);
  if (want_vectors) {
    out.vectors.assign(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + k] = v[i * n + order[k]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse largest eigenpair

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> f;  // unit norm, first significant coordinate positive
  double residual = 0.0;  // ||M f - lambda f||_2
  std::size_t iterations = 0;
  bool converged = false;
};

struct LanczosOptions {
  double tol = 1e-10;
  std::size_t max_iter = 5000;   // operator applications
  std::size_t basis = 64;        // Krylov basis size before a restart
  std::uint64_t seed = 0;        // start vector
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Sign convention: first coordinate above 1e-8 * max|f| is positive.
inline void fix_sign(std::vector<double>& f) {
  double big = 0.0;
  for (double x : f) big = std::max(big, std::abs(x));
  for (double x : f) {
    if (std::abs(x) > 1e-8 * big) {
      if (x < 0)
        for (double& y : f) y = -y;
      return;
    }
  }
}

inline void fill_start(std::span<double> v, std::uint64_t seed) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint64_t h = derive_seed(seed, i);
    v[i] = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
}

}  // namespace detail

/// Largest algebraic eigenvalue of M with a certified residual.
///
/// Thick-restart Lanczos on M + sigma I (sigma = Gershgorin radius, so the
/// target is the dominant eigenvalue of a positive semidefinite operator).
/// Every new Krylov vector is orthogonalized against the whole retained
/// basis, with a second pass when cancellation is detected. On restart the
/// top half of the Ritz vectors is kept. Converged means the explicitly
/// recomputed residual ||M f - lambda f|| <= tol (|lambda| + sigma).
inline EigenPair lambda_max(const SparseSym& M, const LanczosOptions& opt = {}) {
  const std::size_t n = M.dim();
  require(n > 0, Errc::empty_matrix, "lambda_max on an empty matrix");
  require(opt.tol > 0, Errc::invalid_parameters, "tolerance must be positive");
  const double sigma = M.gershgorin();
  EigenPair out;
  if (sigma == 0.0) {
    out.f.assign(n, 0.0);
    out.f[0] = 1.0;
    out.converged = true;
    return out;
  }

  const std::size_t m = std::max<std::size_t>(2, std::min(opt.basis, n));
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<double> H(m * m, 0.0);
  std::vector<double> w(n), y(n), best_f;
  double best_res = INFINITY, best_lambda = 0.0;

  detail::fill_start(V[0], opt.seed);
  {
    const double nv = detail::norm(V[0]);
    for (double& x : V[0]) x /= nv;
  }
  std::size_t kept = 0;
  std::uint64_t refill = 1;

  auto true_residual = [&](std::span<const double> f, double lambda) {
    M.multiply(f, w);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (w[i] - lambda * f[i]) * (w[i] - lambda * f[i]);
    return std::sqrt(s);
  };

  while (true) {
    std::size_t dim = m;
    bool invariant = false;
    double beta = 0.0;
    for (std::size_t j = kept; j < m; ++j) {
      M.multiply(V[j], w, sigma);
      ++out.iterations;
      const double before = detail::norm(w);
      std::vector<double> coef(j + 1, 0.0);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i <= j; ++i) {
          const double c = detail::dot(V[i], w);
          coef[i] += c;
          for (std::size_t t = 0; t < n; ++t) w[t] -= c * V[i][t];
        }
        if (detail::norm(w) > 0.7071 * before) break;
      }
      for (std::size_t i = 0; i <= j; ++i) H[i * m + j] = H[j * m + i] = coef[i];
      beta = detail::norm(w);
      if (beta <= 1e-13 * sigma || j + 1 == n) {
        dim = j + 1;
        invariant = true;
        break;
      }
      for (std::size_t t = 0; t < n; ++t) V[j + 1][t] = w[t] / beta;
      if (j + 1 < m) H[(j + 1) * m + j] = H[j * m + j + 1] = beta;
    }

    std::vector<double> small(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) small[i * dim + j] = H[i * m + j];
    const DenseEigen ritz = dense_eigs(std::move(small), dim);

    // Top Ritz vector.
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      const double s = ritz.vectors[i * dim + 0];
      for (std::size_t t = 0; t < n; ++t) y[t] += s * V[i][t];
    }
    const double ny = detail::norm(y);
    for (double& x : y) x /= ny;
    const double lambda = ritz.values[0] - sigma;
    const double threshold = opt.tol * (std::abs(lambda) + sigma);
    const double estimate = invariant ? 0.0 : std::abs(beta * ritz.vectors[(dim - 1) * dim + 0]);

    if (estimate <= threshold || invariant || out.iterations >= opt.max_iter) {
      const double res = true_residual(y, lambda);
      if (res < best_res) {
        best_res = res;
        best_lambda = lambda;
        best_f = y;
      }
      if (res <= threshold) {
        out.converged = true;
        break;
      }
      if (out.iterations >= opt.max_iter) break;
    }

    // Thick restart: keep the leading Ritz vectors, continue from the
    // residual direction (or a fresh vector after an invariant subspace).
    kept = std::max<std::size_t>(1, std::min(dim / 2, dim - 1));
    std::vector<std::vector<double>> kept_vecs(kept, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < kept; ++k)
      for (std::size_t i = 0; i < dim; ++i) {
        const double s = ritz.vectors[i * dim + k];
        for (std::size_t t = 0; t < n; ++t) kept_vecs[k][t] += s * V[i][t];
      }
    std::vector<double> next(n);
    if (!invariant) {
      next = V[dim];
    } else {
      detail::fill_start(next, derive_seed(opt.seed, refill++));
    }
    for (std::size_t k = 0; k < kept; ++k) V[k] = std::move(kept_vecs[k]);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < kept; ++k) {
        const double c = detail::dot(V[k], next);
        for (std::size_t t = 0; t < n; ++t) next[t] -= c * V[k][t];
      }
    const double nn = detail::norm(next);
    if (nn == 0.0) break;  // kept vectors already span the space
    for (double& x : next) x /= nn;
    V[kept] = std::move(next);
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t k = 0; k < kept; ++k) H[k * m + k] = ritz.values[k];
  }

  out.lambda = best_lambda;
  out.f = std::move(best_f);
  out.residual = best_res;
  detail::fix_sign(out.f);
  return out;
}

/// ||M|| = max(lambda_max(M), lambda_max(-M)).
inline double spectral_norm(const SparseSym& M, const LanczosOptions& opt = {}) {
  const auto top = lambda_max(M, opt);
  const auto bottom = lambda_max(M.negated(), opt);
  return std::max(top.lambda, bottom.lambda);
}

/// max_{i != j} |M_ij|, a lower bound on lambda_max for zero-diagonal M.
inline double max_entry_lower_bound(const SparseSym& M) {
  require(M.zero_diagonal(), Errc::invalid_parameters, "max_entry_lower_bound needs a zero diagonal");
  return M.max_abs_offdiag();
}

}  // namespace wrg
