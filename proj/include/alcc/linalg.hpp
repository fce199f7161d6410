#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>

#include "alcc/common.hpp"

namespace alcc {

/// Dense row-major matrix. Immutable by convention once built.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector entries;  // row-major, length rows*cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0.0) {}
  DenseMatrix(std::size_t r, std::size_t c, Vector e) : rows(r), cols(c), entries(std::move(e)) {
    if (entries.size() != rows * cols) throw DimensionError("DenseMatrix: entry count");
  }

  double& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  Vector apply(const Vector& v) const {
    if (v.size() != cols) throw DimensionError("DenseMatrix::apply");
    Vector r(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      const double* row = entries.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * v[j];
      r[i] = s;
    }
    return r;
  }

  Vector apply_adjoint(const Vector& w) const {
    if (w.size() != rows) throw DimensionError("DenseMatrix::apply_adjoint");
    Vector r(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = entries.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) r[j] += row[j] * w[i];
    }
    return r;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

/// Linear map given by a forward/adjoint pair. The two closures must satisfy
/// <Av, w> = <v, A^T w>; see adjoint_consistent() for the probe-based check.
struct LinearMap {
  std::function<Vector(const Vector&)> forward;
  std::function<Vector(const Vector&)> adjoint;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;

  Vector apply(const Vector& v) const {
    if (v.size() != in_dim) throw DimensionError("LinearMap::apply");
    return forward(v);
  }
  Vector apply_adjoint(const Vector& w) const {
    if (w.size() != out_dim) throw DimensionError("LinearMap::apply_adjoint");
    return adjoint(w);
  }

  static LinearMap from_matrix(DenseMatrix m) {
    auto shared = std::make_shared<const DenseMatrix>(std::move(m));
    LinearMap map;
    map.in_dim = shared->cols;
    map.out_dim = shared->rows;
    map.forward = [shared](const Vector& v) { return shared->apply(v); };
    map.adjoint = [shared](const Vector& w) { return shared->apply_adjoint(w); };
    return map;
  }

  static LinearMap identity(std::size_t n) {
    LinearMap map;
    map.in_dim = map.out_dim = n;
    map.forward = [](const Vector& v) { return v; };
    map.adjoint = [](const Vector& w) { return w; };
    return map;
  }
};

/// Probe-based adjoint consistency check: <Av,w> == <v,A^T w> on random pairs.
inline bool adjoint_consistent(const LinearMap& map, std::size_t probes = 100,
                               std::uint64_t seed = 7, double rel_tol = 1e-10) {
  Rng rng(seed);
  for (std::size_t p = 0; p < probes; ++p) {
    Vector v = rng.gaussian_vector(map.in_dim);
    Vector w = rng.gaussian_vector(map.out_dim);
    const double lhs = dot(map.apply(v), w);
    const double rhs = dot(v, map.apply_adjoint(w));
    if (std::abs(lhs - rhs) > rel_tol * (1.0 + std::abs(lhs) + std::abs(rhs))) return false;
  }
  return true;
}

/// Symmetric matrix stored as a scaled upper-triangle vector ("svec"):
/// row-wise order (0,0),(0,1),...,(1,1),..., off-diagonals multiplied by
/// sqrt(2) so that the Euclidean norm of the svec equals the Frobenius norm
/// of the matrix and <svec(M), svec(N)> = trace(MN).
struct SymMatrix {
  std::size_t dim = 0;
  Vector svec;  // length dim*(dim+1)/2

  SymMatrix() = default;
  explicit SymMatrix(std::size_t d) : dim(d), svec(svec_len(d), 0.0) {}
  SymMatrix(std::size_t d, Vector packed) : dim(d), svec(std::move(packed)) {
    if (svec.size() != svec_len(d)) throw DimensionError("SymMatrix: svec length");
  }

  static std::size_t svec_len(std::size_t d) { return d * (d + 1) / 2; }

  static std::size_t svec_index(std::size_t d, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * d - i * (i - 1) / 2 + (j - i);
  }

  /// Build from a full row-major d*d array (symmetrized by averaging).
  static SymMatrix from_full(std::size_t d, const Vector& full) {
    if (full.size() != d * d) throw DimensionError("SymMatrix::from_full");
    SymMatrix m(d);
    static const double kSqrt2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        const double v = 0.5 * (full[i * d + j] + full[j * d + i]);
        m.svec[svec_index(d, i, j)] = (i == j) ? v : kSqrt2 * v;
      }
    return m;
  }

  Vector to_full() const {
    static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
    Vector full(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        const double s = svec[svec_index(dim, i, j)];
        const double v = (i == j) ? s : kInvSqrt2 * s;
        full[i * dim + j] = v;
        full[j * dim + i] = v;
      }
    return full;
  }

  double frob_norm() const { return norm2(svec); }
};

namespace detail {

/// Gaussian elimination with partial pivoting; false if (near-)singular.
inline bool solve_linear(DenseMatrix a, Vector rhs, Vector& out) {
  const std::size_t n = a.rows;
  if (a.cols != n || rhs.size() != n) throw DimensionError("solve_linear");
  double scale = 0.0;
  for (double v : a.entries) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= 1e-10 * std::max(scale, 1.0)) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      rhs[r] -= f * rhs[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t j = ri + 1; j < n; ++j) s -= a(ri, j) * out[j];
    out[ri] = s / a(ri, ri);
  }
  return true;
}

/// One full cyclic Jacobi sweep over a full symmetric matrix `a` (d*d,
/// row-major), accumulating rotations into `v`. Returns the off-diagonal
/// Frobenius norm after the sweep.
inline double jacobi_sweep(std::size_t d, Vector& a, Vector& v) {
  for (std::size_t p = 0; p + 1 < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) {
      const double apq = a[p * d + q];
      if (apq == 0.0) continue;
      const double app = a[p * d + p];
      const double aqq = a[q * d + q];
      const double theta = (aqq - app) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      for (std::size_t k = 0; k < d; ++k) {
        const double akp = a[k * d + p];
        const double akq = a[k * d + q];
        a[k * d + p] = c * akp - s * akq;
        a[k * d + q] = s * akp + c * akq;
      }
      for (std::size_t k = 0; k < d; ++k) {
        const double apk = a[p * d + k];
        const double aqk = a[q * d + k];
        a[p * d + k] = c * apk - s * aqk;
        a[q * d + k] = s * apk + c * aqk;
      }
      for (std::size_t k = 0; k < d; ++k) {
        const double vkp = v[k * d + p];
        const double vkq = v[k * d + q];
        v[k * d + p] = c * vkp - s * vkq;
        v[k * d + q] = s * vkp + c * vkq;
      }
    }
  }
  double off = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) off += a[i * d + j] * a[i * d + j];
  return std::sqrt(off);
}

}  // namespace detail

struct EigResult {
  Vector eigenvalues;       // descending
  DenseMatrix eigenvectors; // orthonormal columns, column j pairs with eigenvalues[j]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Intended for desk-scale matrices (dim <= 200).
inline EigResult sym_eig(const SymMatrix& m) {
  const std::size_t d = m.dim;
  if (d > 200) throw InvalidParameter("sym_eig: dim <= 200 (desk scale)");
  require_finite(m.svec, "sym_eig");
  Vector a = m.to_full();
  Vector v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const double scale = m.frob_norm();
  const double stop = 1e-14 * (1.0 + scale);
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (detail::jacobi_sweep(d, a, v) <= stop) break;
  }

  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a[i * d + i] > a[j * d + j]; });

  EigResult res;
  res.eigenvalues.resize(d);
  res.eigenvectors = DenseMatrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    res.eigenvalues[j] = a[order[j] * d + order[j]];
    for (std::size_t i = 0; i < d; ++i) res.eigenvectors(i, j) = v[i * d + order[j]];
  }
  return res;
}

/// Largest singular value of a linear map, estimated by power iteration on
/// A^T A with a seeded random start. Restarts once with a fresh vector if the
/// first run stagnates before reaching `tol` relative accuracy.
inline double spectral_norm(const LinearMap& map, double tol = 1e-8, std::size_t max_iter = 0,
                            std::uint64_t seed = 13) {
  if (tol <= 0.0) throw InvalidParameter("spectral_norm: tol must be positive");
  const std::size_t n = map.in_dim;
  if (n == 0) return 0.0;
  if (max_iter == 0)
    max_iter = static_cast<std::size_t>(20.0 * std::log(static_cast<double>(std::max<std::size_t>(n, 2)))) + 20;

  Rng rng(seed);
  double best = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector v = rng.gaussian_vector(n);
    double nv = norm2(v);
    if (nv == 0.0) continue;
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    bool converged = false;
    const std::size_t iters = (attempt == 0) ? max_iter : 2 * max_iter;
    for (std::size_t it = 0; it < iters; ++it) {
      Vector w = map.apply_adjoint(map.apply(v));
      require_finite(w, "spectral_norm");
      const double lam_new = dot(v, w);  // Rayleigh quotient of A^T A
      const double nw = norm2(w);
      if (nw == 0.0) { lambda = 0.0; converged = true; break; }
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
      if (it > 0 && std::abs(lam_new - lambda) <= tol * std::max(std::abs(lam_new), 1e-300)) {
        lambda = lam_new;
        converged = true;
        break;
      }
      lambda = lam_new;
    }
    best = std::max(best, std::sqrt(std::max(lambda, 0.0)));
    if (converged) break;  // stagnated -> one restart with a new random start
  }
  return best;
}

}  // namespace alcc
