#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>

#include "alcc/common.hpp"
#include "alcc/linalg.hpp"

namespace alcc {

inline double soft_threshold(double x, double level) {
  if (x > level) return x - level;
  if (x < -level) return x + level;
  return 0.0;
}

/// Euclidean projection onto the unit simplex {x : sum x = 1, x >= 0}
/// by the sort-and-threshold rule.
inline Vector simplex_project(const Vector& xbar) {
  const std::size_t n = xbar.size();
  if (n == 0) throw DimensionError("simplex_project: empty vector");
  Vector u(xbar);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < n; ++j) {
    css += u[j];
    const double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      theta = t;
    }
  }
  (void)rho;
  Vector r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::max(xbar[i] - theta, 0.0);
  return r;
}

/// The pair (chi, rho): a simple compact set plus an optional l1 regularizer,
/// exposing the generalized projection
///     argmin { scale * rho(x) + ||x - xbar||_2^2 : x in chi }
/// (note: no 1/2 on the quadratic, so the l1 soft-threshold level is
/// scale*lambda/2) together with the exact Euclidean diameter of the set.
class SimpleSetProx {
 public:
  enum class SetKind { Box, L1Ball, L2Ball, Simplex, WholeSpaceBounded };
  enum class RegKind { Zero, L1 };

  static SimpleSetProx box(Vector lo, Vector hi) {
    check_same_dim(lo, hi, "SimpleSetProx::box");
    SimpleSetProx s(SetKind::Box, lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw InvalidParameter("SimpleSetProx::box: lo > hi");
    s.diameter_ = norm2(sub(hi, lo));
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
  }

  static SimpleSetProx l1_ball(std::size_t n, double radius) {
    if (radius <= 0.0) throw InvalidParameter("SimpleSetProx::l1_ball: radius > 0");
    SimpleSetProx s(SetKind::L1Ball, n);
    s.radius_ = radius;
    s.diameter_ = 2.0 * radius;
    return s;
  }

  static SimpleSetProx l2_ball(Vector center, double radius) {
    if (radius <= 0.0) throw InvalidParameter("SimpleSetProx::l2_ball: radius > 0");
    SimpleSetProx s(SetKind::L2Ball, center.size());
    s.center_ = std::move(center);
    s.radius_ = radius;
    s.diameter_ = 2.0 * radius;
    return s;
  }

  static SimpleSetProx simplex(std::size_t n) {
    if (n == 0) throw DimensionError("SimpleSetProx::simplex: n >= 1");
    SimpleSetProx s(SetKind::Simplex, n);
    s.diameter_ = (n > 1) ? std::sqrt(2.0) : 0.0;
    return s;
  }

  /// l-infinity box [-R, R]^n standing in for a "large enough" chi.
  static SimpleSetProx bounded(std::size_t n, double radius) {
    if (radius <= 0.0) throw InvalidParameter("SimpleSetProx::bounded: radius > 0");
    SimpleSetProx s(SetKind::WholeSpaceBounded, n);
    s.radius_ = radius;
    s.diameter_ = 2.0 * radius * std::sqrt(static_cast<double>(n));
    return s;
  }

  /// Attach an l1 regularizer rho(x) = weight * ||x||_1. The supported
  /// (set, regularizer) combinations are validated here, not at call time.
  SimpleSetProx with_l1_reg(double weight) const {
    if (weight < 0.0) throw InvalidParameter("with_l1_reg: weight >= 0");
    if (set_kind_ == SetKind::L2Ball || set_kind_ == SetKind::Simplex)
      throw UnsupportedCombination("l1 regularizer not supported over " + set_name() +
                                   " (supported: box, bounded, l1ball)");
    SimpleSetProx s(*this);
    s.reg_kind_ = RegKind::L1;
    s.reg_weight_ = weight;
    return s;
  }

  std::size_t dim() const { return dim_; }
  double diameter() const { return diameter_; }
  SetKind set_kind() const { return set_kind_; }
  RegKind reg_kind() const { return reg_kind_; }
  double reg_weight() const { return reg_weight_; }
  double set_radius() const { return radius_; }
  const Vector& box_lo() const { return lo_; }
  const Vector& box_hi() const { return hi_; }
  const Vector& ball_center() const { return center_; }

  /// rho(x): 0 for the zero regularizer, weight*||x||_1 for l1.
  double reg_value(const Vector& x) const {
    return reg_kind_ == RegKind::L1 ? reg_weight_ * norm1(x) : 0.0;
  }

  /// argmin { scale * rho(x) + ||x - xbar||^2 : x in chi }.
  Vector generalized_projection(const Vector& xbar, double scale) const {
    if (xbar.size() != dim_) throw DimensionError("generalized_projection: dim");
    if (scale < 0.0) throw InvalidParameter("generalized_projection: scale >= 0");
    const double level = (reg_kind_ == RegKind::L1) ? 0.5 * scale * reg_weight_ : 0.0;
    switch (set_kind_) {
      case SetKind::Box: {
        Vector r(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
          r[i] = std::clamp(soft_threshold(xbar[i], level), lo_[i], hi_[i]);
        return r;
      }
      case SetKind::WholeSpaceBounded: {
        Vector r(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
          r[i] = std::clamp(soft_threshold(xbar[i], level), -radius_, radius_);
        return r;
      }
      case SetKind::L1Ball:
        return l1_ball_shrink(xbar, level);
      case SetKind::L2Ball: {
        Vector d = sub(xbar, center_);
        const double nd = norm2(d);
        if (nd <= radius_) return xbar;
        return add(center_, scaled(d, radius_ / nd));
      }
      case SetKind::Simplex:
        return simplex_project(xbar);
    }
    throw Error("generalized_projection: unreachable");
  }

  /// Euclidean projection onto chi (the regularizer plays no role).
  Vector project(const Vector& x) const { return generalized_projection(x, 0.0); }

  /// d_chi(x) = ||x - project(x)||_2.
  double distance_to(const Vector& x) const { return norm2(sub(x, project(x))); }

  bool contains(const Vector& x, double tol) const { return distance_to(x) <= tol; }

  std::string set_name() const {
    switch (set_kind_) {
      case SetKind::Box: return "box";
      case SetKind::L1Ball: return "l1ball";
      case SetKind::L2Ball: return "l2ball";
      case SetKind::Simplex: return "simplex";
      case SetKind::WholeSpaceBounded: return "bounded";
    }
    return "?";
  }

 private:
  SimpleSetProx(SetKind k, std::size_t n) : set_kind_(k), dim_(n) {}

  /// Shrinkage over the l1 ball: soft-threshold at `level`; if the result
  /// leaves the ball, raise the threshold until ||x||_1 = r. The total norm
  /// sum_i max(|xbar_i| - theta, 0) is piecewise linear and decreasing in
  /// theta, so scalar bisection on the threshold level is exact to rounding.
  Vector l1_ball_shrink(const Vector& xbar, double level) const {
    auto shrunk_norm = [&](double theta) {
      double s = 0.0;
      for (double x : xbar) s += std::max(std::abs(x) - theta, 0.0);
      return s;
    };
    double lo = level;
    if (shrunk_norm(lo) <= radius_) {
      Vector r(dim_);
      for (std::size_t i = 0; i < dim_; ++i) r[i] = soft_threshold(xbar[i], lo);
      return r;
    }
    double hi = level + norm_inf(xbar);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (shrunk_norm(mid) > radius_ ? lo : hi) = mid;
    }
    Vector r(dim_);  // use hi: guarantees the result stays inside the ball
    for (std::size_t i = 0; i < dim_; ++i) r[i] = soft_threshold(xbar[i], hi);
    return r;
  }

  SetKind set_kind_;
  RegKind reg_kind_ = RegKind::Zero;
  std::size_t dim_;
  double reg_weight_ = 0.0;
  double diameter_ = 0.0;
  double radius_ = 0.0;
  Vector lo_, hi_, center_;
};

/// Smooth objective part: value/gradient closures plus a Lipschitz constant
/// for the gradient. Must be defined on all of R^n (APG extrapolates outside
/// the feasible set).
struct SmoothPart {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;

  static SmoothPart zero() {
    SmoothPart s;
    s.value = [](const Vector&) { return 0.0; };
    s.gradient = [](const Vector& x) { return zeros(x.size()); };
    s.lipschitz = 0.0;
    return s;
  }

  /// gamma(x) = 1/2 x^T Q x + <q, x> with Q symmetric; L = max |eig(Q)|.
  static SmoothPart quadratic(DenseMatrix q_mat, Vector q_lin) {
    if (q_mat.rows != q_mat.cols || q_mat.rows != q_lin.size())
      throw DimensionError("SmoothPart::quadratic: shapes");
    SymMatrix sym = SymMatrix::from_full(q_mat.rows, q_mat.entries);
    double lip = 0.0;
    if (q_mat.rows > 0) {
      EigResult eig = sym_eig(sym);
      for (double lam : eig.eigenvalues) lip = std::max(lip, std::abs(lam));
    }
    auto shared_q = std::make_shared<const DenseMatrix>(std::move(q_mat));
    auto shared_l = std::make_shared<const Vector>(std::move(q_lin));
    SmoothPart s;
    s.value = [shared_q, shared_l](const Vector& x) {
      return 0.5 * dot(x, shared_q->apply(x)) + dot(*shared_l, x);
    };
    s.gradient = [shared_q, shared_l](const Vector& x) {
      Vector g = shared_q->apply(x);
      axpy(1.0, *shared_l, g);
      return g;
    };
    s.lipschitz = lip;
    return s;
  }

  /// gamma(x) = <c, x>.
  static SmoothPart linear(Vector c) {
    auto shared = std::make_shared<const Vector>(std::move(c));
    SmoothPart s;
    s.value = [shared](const Vector& x) { return dot(*shared, x); };
    s.gradient = [shared](const Vector&) { return *shared; };
    s.lipschitz = 0.0;
    return s;
  }
};

}  // namespace alcc
