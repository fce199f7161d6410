#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "alcc/common.hpp"
#include "alcc/cones.hpp"
#include "alcc/linalg.hpp"
#include "alcc/simple_sets.hpp"
#include "alcc/solver.hpp"

namespace alcc {

/// Min-max game: the outer player picks a mixed strategy x on the unit
/// simplex subject to Ax - b in K; the adversary picks y on a p-simplex. With
/// phi(y) = tau/2 ||y||^2 the inner maximizer has the closed form
/// y(x) = Pi_simplex(Cx/tau), and gamma(x) = <y(x), Cx> - tau/2 ||y(x)||^2 has
/// a gradient C^T y(x) that is Lipschitz with constant sigma_max(C)^2 / tau.
struct MinMaxGame {
  DenseMatrix c_payoff;  // p x n
  double tau = 1.0;
  DenseMatrix a;
  Vector b;
  Cone cone = Cone::nonneg(0);

  std::size_t num_actions() const { return c_payoff.cols; }
  std::size_t num_adversary_actions() const { return c_payoff.rows; }

  /// sigma_max(C)^2 computed from the exact top eigenvalue of C^T C.
  double sigma_max_sq() const {
    const std::size_t n = c_payoff.cols;
    DenseMatrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < c_payoff.rows; ++r) s += c_payoff(r, i) * c_payoff(r, j);
        gram(i, j) = s;
      }
    EigResult eig = sym_eig(SymMatrix::from_full(n, gram.entries));
    return std::max(eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front(), 0.0);
  }
};

/// Value and gradient of the game's smooth part at x (Danskin).
inline std::pair<double, Vector> eval_gamma_minmax(const MinMaxGame& game, const Vector& x) {
  if (x.size() != game.num_actions()) throw DimensionError("eval_gamma_minmax: x dim");
  Vector cx = game.c_payoff.apply(x);
  Vector y = simplex_project(scaled(cx, 1.0 / game.tau));
  const double value = dot(y, cx) - 0.5 * game.tau * dot(y, y);
  return {value, game.c_payoff.apply_adjoint(y)};
}

inline SmoothPart minmax_smooth_part(const MinMaxGame& game) {
  auto shared = std::make_shared<const MinMaxGame>(game);
  SmoothPart s;
  s.value = [shared](const Vector& x) { return eval_gamma_minmax(*shared, x).first; };
  s.gradient = [shared](const Vector& x) { return eval_gamma_minmax(*shared, x).second; };
  s.lipschitz = game.sigma_max_sq() / game.tau;
  return s;
}

inline ConicProgram minmax_program(const MinMaxGame& game) {
  ConicProgram prog{SimpleSetProx::simplex(game.num_actions()), minmax_smooth_part(game),
                    LinearMap::from_matrix(game.a), game.b, game.cone};
  prog.validate();
  return prog;
}

/// l1-minimization under a linear matrix inequality:
///   min ||x||_1  s.t.  sum_j A_j x_j + B  is PSD,
/// solved over the l1 ball of radius ||x0||_1 around a known feasible x0.
struct L1LmiInstance {
  std::vector<SymMatrix> a_mats;
  SymMatrix b_mat;
  Vector x0;

  double radius() const { return norm1(x0); }
  std::size_t num_vars() const { return a_mats.size(); }
  std::size_t matrix_dim() const { return b_mat.dim; }

  void validate() const {
    if (a_mats.size() != x0.size()) throw DimensionError("L1LmiInstance: |A_j| vs x0");
    for (const auto& m : a_mats)
      if (m.dim != b_mat.dim) throw DimensionError("L1LmiInstance: matrix dims");
    SymMatrix combo = b_mat;
    for (std::size_t j = 0; j < a_mats.size(); ++j) axpy(x0[j], a_mats[j].svec, combo.svec);
    EigResult eig = sym_eig(combo);
    if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -1e-8)
      throw InvalidParameter("L1LmiInstance: x0 is not feasible");
  }
};

/// Recast the LMI constraint into conic form: A x = svec(sum_j A_j x_j)
/// (columns svec(A_j)), b = svec(-B), K = PSD cone in scaled-svec coordinates.
inline std::tuple<LinearMap, Vector, Cone> lmi_as_linear_map(const L1LmiInstance& inst) {
  const std::size_t n = inst.num_vars();
  const std::size_t d = inst.matrix_dim();
  const std::size_t sd = SymMatrix::svec_len(d);
  DenseMatrix a(sd, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < sd; ++r) a(r, j) = inst.a_mats[j].svec[r];
  return {LinearMap::from_matrix(std::move(a)), scaled(inst.b_mat.svec, -1.0), Cone::psd(d)};
}

inline ConicProgram lmi_program(const L1LmiInstance& inst) {
  inst.validate();
  auto [a_map, b, cone] = lmi_as_linear_map(inst);
  ConicProgram prog{SimpleSetProx::l1_ball(inst.num_vars(), inst.radius()).with_l1_reg(1.0),
                    SmoothPart::zero(), std::move(a_map), std::move(b), std::move(cone)};
  prog.validate();
  return prog;
}

/// Box-constrained LP fixture with exact optimum from vertex enumeration:
///   min <c, x>  s.t.  Ax - b in NonNeg(m),  x in [0,1]^n.
struct LpFixture {
  ConicProgram prog;
  DenseMatrix a;
  Vector c;
  double p_star = 0.0;
  Vector x_star;
  Vector y_star;
  bool dual_unique = false;

  Reference reference() const {
    Reference r;
    r.p_star = p_star;
    r.x_star = x_star;
    r.y_star = y_star;
    r.dual_unique = dual_unique;
    return r;
  }
};

namespace detail {

/// Lagrangian dual value of the box LP at y in K* = NonNeg:
/// g0(y) = <b, y> + sum_i min over [lo_i, hi_i] of (c - A^T y)_i x_i.
inline double box_lp_dual_value(const DenseMatrix& a, const Vector& b, const Vector& c,
                                const Vector& lo, const Vector& hi, const Vector& y) {
  Vector r = c;
  axpy(-1.0, a.apply_adjoint(y), r);
  double g = dot(b, y);
  for (std::size_t i = 0; i < r.size(); ++i) g += std::min(r[i] * lo[i], r[i] * hi[i]);
  return g;
}

}  // namespace detail

/// Generate a random solvable box LP with an exact KKT pair found by vertex
/// enumeration plus dual recovery over active-row supports. Degenerate draws
/// (no verifiable dual, inactive cone constraints, near-tied vertices) are
/// reseeded up to 10 times.
inline LpFixture random_solvable_lp(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n > 12) throw InvalidParameter("random_solvable_lp: n <= 12");
  if (n == 0 || m == 0) throw InvalidParameter("random_solvable_lp: n, m >= 1");

  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    Vector lo(n, 0.0), hi(n, 1.0);
    DenseMatrix a(m, n);
    for (auto& v : a.entries) v = rng.uniform(-1.0, 1.0);
    Vector interior = rng.uniform_vector(n, 0.3, 0.7);
    Vector b = a.apply(interior);
    for (auto& v : b) v -= rng.uniform(0.05, 0.3);  // strictly feasible slack
    Vector c = rng.gaussian_vector(n);

    // Enumerate vertices: all choices of n active constraints among the
    // 2n box faces and m cone rows.
    const std::size_t total = 2 * n + m;
    std::vector<std::size_t> pick(n);
    std::vector<Vector> vertices;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
      if (depth == n) {
        DenseMatrix sys(n, n);
        Vector rhs(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
          const std::size_t idx = pick[r];
          if (idx < n) {           // x_i = lo_i
            sys(r, idx) = 1.0;
            rhs[r] = lo[idx];
          } else if (idx < 2 * n) {  // x_i = hi_i
            sys(r, idx - n) = 1.0;
            rhs[r] = hi[idx - n];
          } else {                 // A_i x = b_i
            for (std::size_t j = 0; j < n; ++j) sys(r, j) = a(idx - 2 * n, j);
            rhs[r] = b[idx - 2 * n];
          }
        }
        Vector x;
        if (detail::solve_linear(sys, rhs, x)) {
          bool feasible = true;
          for (std::size_t i = 0; i < n && feasible; ++i)
            feasible = x[i] >= lo[i] - 1e-9 && x[i] <= hi[i] + 1e-9;
          Vector ax = a.apply(x);
          for (std::size_t i = 0; i < m && feasible; ++i) feasible = ax[i] >= b[i] - 1e-9;
          if (feasible) vertices.push_back(std::move(x));
        }
        return;
      }
      for (std::size_t i = start; i < total; ++i) {
        pick[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    if (vertices.empty()) continue;

    std::size_t best = 0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
      if (dot(c, vertices[i]) < dot(c, vertices[best])) best = i;
    const Vector& x_star = vertices[best];
    const double p_star = dot(c, x_star);

    // Active cone rows and coordinate status at the optimal vertex.
    Vector ax = a.apply(x_star);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m; ++i)
      if (std::abs(ax[i] - b[i]) <= 1e-8) active.push_back(i);

    enum class Pos { Lo, Hi, Interior };
    std::vector<Pos> pos(n);
    std::vector<std::size_t> interior_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (x_star[i] <= lo[i] + 1e-8) pos[i] = Pos::Lo;
      else if (x_star[i] >= hi[i] - 1e-8) pos[i] = Pos::Hi;
      else { pos[i] = Pos::Interior; interior_idx.push_back(i); }
    }

    // Dual recovery: y >= 0 supported on active rows with
    // (c - A^T y)_i = 0 on interior coords, >= 0 at lo, <= 0 at hi.
    std::vector<Vector> verified;
    const std::size_t na = active.size();
    for (std::size_t mask = 0; mask < (1u << na); ++mask) {
      std::vector<std::size_t> supp;
      for (std::size_t i = 0; i < na; ++i)
        if (mask & (1u << i)) supp.push_back(active[i]);

      Vector y(m, 0.0);
      if (!supp.empty()) {
        const std::size_t s = supp.size();
        // Least squares on the interior stationarity equations E y_S = c_I.
        DenseMatrix e(interior_idx.size(), s);
        Vector rhs_int(interior_idx.size());
        for (std::size_t r = 0; r < interior_idx.size(); ++r) {
          for (std::size_t q = 0; q < s; ++q) e(r, q) = a(supp[q], interior_idx[r]);
          rhs_int[r] = c[interior_idx[r]];
        }
        DenseMatrix gram(s, s);
        Vector gr(s, 0.0);
        for (std::size_t p = 0; p < s; ++p) {
          for (std::size_t q = 0; q < s; ++q) {
            double v = 0.0;
            for (std::size_t r = 0; r < interior_idx.size(); ++r) v += e(r, p) * e(r, q);
            gram(p, q) = v;
          }
          for (std::size_t r = 0; r < interior_idx.size(); ++r) gr[p] += e(r, p) * rhs_int[r];
        }
        Vector ys;
        if (!detail::solve_linear(gram, gr, ys)) continue;
        for (std::size_t q = 0; q < s; ++q) y[supp[q]] = ys[q];
      }

      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) ok = y[i] >= -1e-9;
      if (!ok) continue;
      for (auto& v : y) v = std::max(v, 0.0);
      Vector r = c;
      axpy(-1.0, a.apply_adjoint(y), r);
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (pos[i] == Pos::Interior) ok = std::abs(r[i]) <= 1e-8;
        else if (pos[i] == Pos::Lo) ok = r[i] >= -1e-8;
        else ok = r[i] <= 1e-8;
      }
      if (!ok) continue;
      if (std::abs(detail::box_lp_dual_value(a, b, c, lo, hi, y) - p_star) > 1e-8) continue;
      verified.push_back(std::move(y));
    }
    if (verified.empty()) continue;

    // Deduplicate verified duals; uniqueness additionally demands strict
    // complementarity so the flag is robust to perturbation.
    std::vector<Vector> distinct;
    for (const auto& y : verified) {
      bool found = false;
      for (const auto& z : distinct) found = found || norm_inf(sub(y, z)) <= 1e-8;
      if (!found) distinct.push_back(y);
    }
    const Vector& y_star = distinct.front();
    bool unique = distinct.size() == 1;
    for (std::size_t i : active) unique = unique && y_star[i] > 1e-6;

    // Keep fixtures where the cone constraint really binds; otherwise the
    // dual is zero and the instance exercises nothing.
    if (norm_inf(y_star) < 0.05) continue;

    LpFixture fx{ConicProgram{SimpleSetProx::box(lo, hi), SmoothPart::linear(c),
                              LinearMap::from_matrix(a), b, Cone::nonneg(m)},
                 a, c, p_star, x_star, y_star, unique};
    fx.prog.validate();
    return fx;
  }
  throw Error("random_solvable_lp: no acceptable draw in 10 attempts");
}

}  // namespace alcc
