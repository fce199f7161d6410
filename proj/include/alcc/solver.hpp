#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "alcc/apg.hpp"
#include "alcc/common.hpp"
#include "alcc/cones.hpp"
#include "alcc/linalg.hpp"
#include "alcc/simple_sets.hpp"

namespace alcc {

/// Conic program  min { rho(x) + gamma(x) : Ax - b in K, x in chi }  with
/// p(x) = rho(x) + gamma(x). chi and rho live in `prox`, gamma in `smooth`.
struct ConicProgram {
  SimpleSetProx prox;
  SmoothPart smooth;
  LinearMap a_map;
  Vector b;
  Cone cone;

  void validate() const {
    if (a_map.in_dim != prox.dim()) throw DimensionError("ConicProgram: A columns vs chi dim");
    if (a_map.out_dim != b.size()) throw DimensionError("ConicProgram: A rows vs b");
    if (cone.dim() != b.size()) throw DimensionError("ConicProgram: cone ambient vs b");
    require_finite(b, "ConicProgram::b");
  }

  double objective(const Vector& x) const { return prox.reg_value(x) + smooth.value(x); }

  /// d_K(Ax - b).
  double infeasibility(const Vector& x) const { return cone.distance(sub(a_map.apply(x), b)); }
};

/// Known optimum of a fixture, used for bound audits and tests.
struct Reference {
  std::optional<double> p_star;
  std::optional<Vector> x_star;
  std::optional<Vector> y_star;
  bool dual_unique = false;
};

/// Outer-loop parameter schedule: mu_k = beta^k mu0,
/// alpha_k = alpha0 / (k^{2(1+c)} beta^k), eta_k likewise, for k >= 1.
struct ScheduleConfig {
  double alpha0 = 1.0;
  double eta0 = 1.0;
  double mu0 = 1.0;
  double beta = 2.0;
  double c = 0.5;
  std::size_t max_outer = 60;
  double target_eps = 1e-6;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(alpha0 > 0.0 && eta0 > 0.0 && mu0 > 0.0)) throw InvalidParameter("schedule: alpha0, eta0, mu0 > 0");
    if (!(beta > 1.0)) throw InvalidParameter("schedule: beta > 1");
    if (!(c > 0.0)) throw InvalidParameter("schedule: c > 0");
    if (max_outer == 0) throw InvalidParameter("schedule: max_outer >= 1");
  }

  double mu(std::size_t k) const { return std::pow(beta, static_cast<double>(k)) * mu0; }
  double alpha(std::size_t k) const { return alpha0 / decay(k); }
  double eta(std::size_t k) const { return eta0 / decay(k); }
  /// Computable majorant of the per-iteration inexactness xi^(k).
  double xi(std::size_t k, double set_diameter) const {
    return std::max(alpha(k), eta(k) * set_diameter);
  }

 private:
  double decay(std::size_t k) const {
    const double kd = static_cast<double>(k);
    return std::pow(kd, 2.0 * (1.0 + c)) * std::pow(beta, kd);
  }
};

/// KKT residual summary at a candidate pair (x, y): primal cone infeasibility,
/// distance of y to the dual cone, complementarity |<y, Pi_K(Ax-b)>|, and a
/// composite-gradient stationarity residual of the penalty Lagrangian over chi.
/// Relative forms divide by 1 + ||b||.
struct Certificate {
  double primal_infeas = 0.0;
  double dual_membership = 0.0;
  double complementarity = 0.0;
  double stationarity = 0.0;
  double b_norm = 0.0;

  double primal_infeas_rel() const { return primal_infeas / (1.0 + b_norm); }
  double dual_membership_rel() const { return dual_membership / (1.0 + b_norm); }
  double complementarity_rel() const { return complementarity / (1.0 + b_norm); }
  double stationarity_rel() const { return stationarity / (1.0 + b_norm); }

  double max_residual() const {
    return std::max(std::max(primal_infeas, dual_membership),
                    std::max(complementarity, stationarity));
  }
};

enum class OracleCondition { FunctionGap, Subgradient };

struct OracleCert {
  OracleCondition condition = OracleCondition::FunctionGap;
  /// Guaranteed gap alpha_k/mu_k for the function-gap path, measured ||q||
  /// for the subgradient path.
  double value = 0.0;
  std::size_t iter_cap = 0;
};

/// Per-outer-iterate record. `y` is the multiplier used by iteration k and
/// `y_next` the one produced by the dual update.
struct OuterIterate {
  std::size_t k = 0;
  Vector x;
  Vector y;
  Vector y_next;
  double mu = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  /// Inexactness majorant used in the dual bookkeeping; covers both the
  /// scheduled max(alpha_k, eta_k * diameter) and the certificate the inner
  /// solver actually achieved.
  double xi = 0.0;
  std::size_t inner_iters = 0;
  double infeas = 0.0;
  double obj = 0.0;
  OracleCert oracle_cert;
  /// Residual = bound minus measured value; nonnegative (up to slack) means
  /// the bound holds.
  double thm7_residual = 0.0;
  std::optional<double> thm6_residual;  // needs p*
  std::optional<double> thm5_residual;  // needs p* and y*
  std::optional<double> thm4_residual;  // needs y*
};

enum class SolveStatus { Converged, MaxOuterReached, NumericFailure };

struct SolveTrace {
  std::vector<OuterIterate> iterates;
  SolveStatus status = SolveStatus::MaxOuterReached;
  Certificate final_kkt;
  double sigma_max = 0.0;  // safeguarded estimate used for the smoothness constant
  std::string failure_message;
};

struct SolveOptions {
  std::optional<Vector> x0;
  std::optional<Reference> reference;
  std::function<void(const OuterIterate&)> observer;
};

/// Penalty Lagrangian L_mu(x, y) = p(x) + mu/2 d_K(Ax-b-y/mu)^2 - ||y||^2/(2 mu).
inline double penalty_lagrangian(const ConicProgram& prog, const Vector& x, const Vector& y,
                                 double mu) {
  if (!(mu > 0.0)) throw InvalidParameter("penalty_lagrangian: mu > 0");
  Vector v = sub(sub(prog.a_map.apply(x), prog.b), scaled(y, 1.0 / mu));
  const double d = prog.cone.distance(v);
  return prog.objective(x) + 0.5 * mu * d * d - dot(y, y) / (2.0 * mu);
}

/// Gradient of the penalty term 1/2 d_K(Ax-b-y/mu)^2 with respect to x:
/// A^T (v - Pi_K(v)) with v = Ax-b-y/mu. Lipschitz with constant sigma_max(A)^2.
inline Vector subproblem_gradient(const ConicProgram& prog, const Vector& x, const Vector& y,
                                  double mu) {
  if (!(mu > 0.0)) throw InvalidParameter("subproblem_gradient: mu > 0");
  Vector v = sub(sub(prog.a_map.apply(x), prog.b), scaled(y, 1.0 / mu));
  Vector vc = sub(v, prog.cone.project(v));
  return prog.a_map.apply_adjoint(vc);
}

/// Dual update: y+ = mu (Pi_K(v) - v) for v = Ax_k - b - y_k/mu_k. The result
/// lies in K* by the cone projection identities.
inline Vector dual_update(const Vector& v, double mu, const Cone& cone) {
  if (!(mu > 0.0)) throw InvalidParameter("dual_update: mu > 0");
  return scaled(sub(cone.project(v), v), mu);
}

namespace detail {

inline Certificate kkt_certificate_impl(const ConicProgram& prog, const Vector& x, const Vector& y,
                                        double mu, double sigma2) {
  Certificate cert;
  cert.b_norm = norm2(prog.b);
  Vector ax_b = sub(prog.a_map.apply(x), prog.b);
  cert.primal_infeas = prog.cone.distance(ax_b);
  cert.dual_membership = prog.cone.dual().distance(y);
  cert.complementarity = std::abs(dot(y, prog.cone.project(ax_b)));

  // Stationarity: composite-gradient residual of L_mu(.,y) over chi. The
  // smooth part has gradient grad gamma + mu A^T Pi^c_K(Ax-b-y/mu) and
  // Lipschitz constant L_gamma + mu sigma_max(A)^2; one proximal-gradient
  // step measures the gradient mapping L ||x - x+||.
  Vector v = sub(ax_b, scaled(y, 1.0 / mu));
  Vector grad = prog.smooth.gradient(x);
  axpy(mu, prog.a_map.apply_adjoint(sub(v, prog.cone.project(v))), grad);
  const double lip = std::max(prog.smooth.lipschitz + mu * sigma2, 1e-12);
  Vector xbar(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xbar[i] = x[i] - grad[i] / lip;
  Vector x_plus = prog.prox.generalized_projection(xbar, 2.0 / lip);
  cert.stationarity = lip * norm2(sub(x, x_plus));
  return cert;
}

}  // namespace detail

/// KKT residual certificate; all four residuals vanish (to tolerance) exactly
/// at KKT pairs of the supported problem classes.
inline Certificate kkt_certificate(const ConicProgram& prog, const Vector& x, const Vector& y,
                                   double mu) {
  if (!(mu > 0.0)) throw InvalidParameter("kkt_certificate: mu > 0");
  const double sigma = spectral_norm(prog.a_map);
  return detail::kkt_certificate_impl(prog, x, y, mu, 1.0201 * sigma * sigma);
}

/// Inner-solver call for the k-th subproblem
///   P_k(x, y_k) = rho(x)/mu_k + [gamma(x)/mu_k + 1/2 d_K(Ax-b-y_k/mu_k)^2]
/// run with warm start, the a-priori iteration cap
///   l_max(k) = ceil( sqrt(2 mu_k L_k / alpha_k) * Delta_chi )
/// and the subgradient certificate threshold eta_k/mu_k. sigma2 is the
/// safeguarded value used for sigma_max(A)^2.
inline std::tuple<Vector, std::size_t, OracleCert> oracle(const ConicProgram& prog,
                                                          const Vector& y_k, std::size_t k,
                                                          const ScheduleConfig& sched,
                                                          const Vector& warm_start,
                                                          double sigma2) {
  if (k < 1) throw InvalidParameter("oracle: k >= 1");
  const double mu_k = sched.mu(k);
  const double alpha_k = sched.alpha(k);
  const double eta_k = sched.eta(k);
  const double lip = std::max(prog.smooth.lipschitz / mu_k + sigma2, 1e-12);
  const double delta = prog.prox.diameter();

  SmoothPart smooth_k;
  smooth_k.lipschitz = lip;
  smooth_k.value = [&prog, y_k, mu_k](const Vector& x) {
    Vector v = sub(sub(prog.a_map.apply(x), prog.b), scaled(y_k, 1.0 / mu_k));
    const double d = prog.cone.distance(v);
    return prog.smooth.value(x) / mu_k + 0.5 * d * d;
  };
  smooth_k.gradient = [&prog, y_k, mu_k](const Vector& x) {
    Vector g = subproblem_gradient(prog, x, y_k, mu_k);
    axpy(1.0 / mu_k, prog.smooth.gradient(x), g);
    return g;
  };

  ApgProblem sub;
  sub.prox = &prog.prox;
  sub.rho_scale = 1.0 / mu_k;
  sub.smooth = std::move(smooth_k);
  sub.start = warm_start;

  const std::size_t cap = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             detail::safe_ceil(std::sqrt(2.0 * mu_k * lip / alpha_k * delta * delta))));
  StoppingRule stop = StoppingRule::both(cap, eta_k / mu_k, delta);
  // The scheduled threshold eventually falls below the rounding floor of the
  // certificate; accept numerically stationary iterates there and report the
  // norm actually achieved.
  stop.stagnation_floor = 1e-14;
  ApgResult res = apg_minimize(sub, stop);

  OracleCert cert;
  cert.iter_cap = cap;
  if (res.stop_reason == ApgStopReason::GradCertificate ||
      res.stop_reason == ApgStopReason::Stagnation) {
    cert.condition = OracleCondition::Subgradient;
    cert.value = res.cert_norm;
  } else {
    cert.condition = OracleCondition::FunctionGap;
    cert.value = alpha_k / mu_k;
  }
  return {std::move(res.x), res.iters, cert};
}

/// Full outer loop: y_1 = 0; at each k call the oracle on P_k warm-started at
/// x_{k-1}, update the dual, record the computable per-iterate bounds, and
/// stop once all KKT certificate residuals reach target_eps (and the
/// objective matches p* to target_eps when a reference is supplied).
inline SolveTrace solve(const ConicProgram& prog, const ScheduleConfig& sched,
                        const SolveOptions& opts = {}) {
  prog.validate();
  sched.validate();

  SolveTrace trace;
  const double sigma_est = spectral_norm(prog.a_map, 1e-8, 0, sched.seed);
  const double sigma = 1.01 * sigma_est;  // safety factor keeps the APG step valid
  const double sigma2 = sigma * sigma;
  trace.sigma_max = sigma;

  Vector x = opts.x0 ? *opts.x0 : prog.prox.project(zeros(prog.prox.dim()));
  if (prog.prox.distance_to(x) > 1e-8) throw InvalidParameter("solve: x0 not in chi");
  Vector y = zeros(prog.b.size());

  const Reference* ref = opts.reference ? &*opts.reference : nullptr;
  const double delta = prog.prox.diameter();
  double xi_sqrt_sum = 0.0;  // sum_{j<k} sqrt(2 xi^(j) mu_j)

  try {
    for (std::size_t k = 1; k <= sched.max_outer; ++k) {
      const double mu_k = sched.mu(k);
      auto [x_k, inner, cert] = oracle(prog, y, k, sched, x, sigma2);
      require_finite(x_k, "solve: oracle output");

      Vector v = sub(sub(prog.a_map.apply(x_k), prog.b), scaled(y, 1.0 / mu_k));
      Vector y_next = dual_update(v, mu_k, prog.cone);
      require_finite(y_next, "solve: dual update");

      OuterIterate it;
      it.k = k;
      it.x = x_k;
      it.y = y;
      it.y_next = y_next;
      it.mu = mu_k;
      it.alpha = sched.alpha(k);
      it.eta = sched.eta(k);
      // The recorded inexactness majorant covers the certificate actually
      // achieved, which can exceed the scheduled eta_k/mu_k once the
      // threshold drops below the certificate's rounding floor.
      it.xi = sched.xi(k, delta);
      if (cert.condition == OracleCondition::Subgradient)
        it.xi = std::max(it.xi, mu_k * cert.value * delta);
      it.inner_iters = inner;
      it.infeas = prog.infeasibility(x_k);
      it.obj = prog.objective(x_k);
      it.oracle_cert = cert;

      const double y_norm = norm2(y);
      it.thm7_residual = (y_norm + norm2(sub(y_next, y))) / mu_k - it.infeas;
      if (ref && ref->p_star) {
        it.thm6_residual =
            sched.xi(k, delta) + y_norm * y_norm / (2.0 * mu_k) - (it.obj - *ref->p_star);
        if (ref->y_star) {
          const double lower = -norm2(*ref->y_star) * prog.cone.distance(v) +
                               dot(y, *ref->y_star) / mu_k;
          it.thm5_residual = (it.obj - *ref->p_star) - lower;
        }
      }
      if (ref && ref->y_star)
        it.thm4_residual = xi_sqrt_sum + norm2(*ref->y_star) - y_norm;

      xi_sqrt_sum += std::sqrt(2.0 * it.xi * mu_k);
      trace.iterates.push_back(it);
      if (opts.observer) opts.observer(trace.iterates.back());

      trace.final_kkt = detail::kkt_certificate_impl(prog, x_k, y_next, mu_k, sigma2);
      const bool obj_ok = !(ref && ref->p_star) ||
                          std::abs(it.obj - *ref->p_star) <= sched.target_eps;
      if (trace.final_kkt.max_residual() <= sched.target_eps && obj_ok) {
        trace.status = SolveStatus::Converged;
        return trace;
      }

      x = std::move(x_k);
      y = std::move(y_next);
    }
    trace.status = SolveStatus::MaxOuterReached;
  } catch (const NumericError& e) {
    trace.status = SolveStatus::NumericFailure;
    trace.failure_message = e.what();
  }
  return trace;
}

}  // namespace alcc
