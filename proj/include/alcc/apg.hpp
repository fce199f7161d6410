#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "alcc/common.hpp"
#include "alcc/simple_sets.hpp"

namespace alcc {

/// Composite problem  min { rho_scale*rho(x) + gamma(x) : x in chi }  where
/// (chi, rho) come from `prox` and gamma is `smooth` (defined on all of R^n).
struct ApgProblem {
  const SimpleSetProx* prox = nullptr;
  double rho_scale = 1.0;
  SmoothPart smooth;
  Vector start;

  void validate() const {
    if (prox == nullptr) throw InvalidParameter("ApgProblem: prox missing");
    if (start.size() != prox->dim()) throw DimensionError("ApgProblem: start dim");
    if (!(smooth.lipschitz > 0.0)) throw InvalidParameter("ApgProblem: lipschitz must be > 0");
    if (prox->distance_to(start) > 1e-10) throw InvalidParameter("ApgProblem: start not feasible");
  }

  double objective(const Vector& x) const {
    return rho_scale * prox->reg_value(x) + smooth.value(x);
  }
};

/// Iteration state. After step l the fields hold x_l (main iterate, feasible),
/// the extrapolated point x_{l+1} used by the next proximal step, and the
/// momentum scalar t_{l+1}.
struct ApgState {
  Vector x1;   // main iterate, always in chi
  Vector x2;   // extrapolated point (may leave chi)
  double t = 1.0;
  std::size_t iter = 0;

  static ApgState initial(const Vector& x0) { return ApgState{x0, x0, 1.0, 0}; }
};

/// Stopping rule: iteration cap, composite-gradient certificate threshold, or
/// both. `dist_bound` is an upper bound on ||x0 - x*|| used only to report the
/// a-priori optimality gap. When `stagnation_floor` is positive and the
/// certificate norm sits below it for many consecutive iterations without
/// reaching `grad_threshold`, the loop returns the best certified point: the
/// threshold has fallen below what double precision can resolve.
struct StoppingRule {
  std::optional<std::size_t> max_iters_cap;
  std::optional<double> grad_threshold;
  double dist_bound = 0.0;
  double stagnation_floor = 0.0;

  static StoppingRule max_iters(std::size_t cap, double dist_bound = 0.0) {
    return StoppingRule{cap, std::nullopt, dist_bound, 0.0};
  }
  static StoppingRule composite_gradient(double threshold) {
    return StoppingRule{std::nullopt, threshold, 0.0, 0.0};
  }
  static StoppingRule both(std::size_t cap, double threshold, double dist_bound = 0.0) {
    return StoppingRule{cap, threshold, dist_bound, 0.0};
  }
};

enum class ApgStopReason { MaxIters, GradCertificate, Stagnation };

struct ApgResult {
  Vector x;
  std::size_t iters = 0;
  /// A-priori gap bound 2*L*D^2/(iters+1)^2 when a distance bound D was
  /// supplied; +inf otherwise.
  double gap_bound = std::numeric_limits<double>::infinity();
  ApgStopReason stop_reason = ApgStopReason::MaxIters;
  /// ||q||_2 of the certificate vector when the gradient rule fired.
  double cert_norm = std::numeric_limits<double>::quiet_NaN();
  /// The certificate vector itself (empty unless the gradient rule fired);
  /// lies in d(rho_bar+gamma)(x) + N_chi(x).
  Vector cert_vector;
};

namespace detail {

/// ceil with a relative backoff of a few ulps, so products whose true value
/// is an exact integer do not round up to the next one.
inline double safe_ceil(double x) { return std::ceil(x - 1e-9 * std::max(1.0, x)); }

}  // namespace detail

/// Smallest iteration count guaranteeing an eps-optimal iterate:
/// l >= sqrt(2*L/eps) * D - 1.
inline std::size_t apg_iteration_cap(double lipschitz, double eps, double dist_bound) {
  if (eps <= 0.0 || lipschitz <= 0.0) throw InvalidParameter("apg_iteration_cap");
  const double raw = std::sqrt(2.0 * lipschitz / eps * dist_bound * dist_bound);
  const double cap = detail::safe_ceil(raw) - 1.0;
  return cap <= 0.0 ? 0 : static_cast<std::size_t>(cap);
}

namespace detail {

/// One proximal-gradient step from the extrapolated point. Completing the
/// square in  rho_bar(x) + <g, x-x2> + L/2 ||x-x2||^2  gives the generalized
/// projection of x2 - g/L with coefficient 2*rho_scale/L on rho.
inline Vector apg_prox_step(const ApgProblem& prob, const Vector& x2, const Vector& grad_x2) {
  const double lip = prob.smooth.lipschitz;
  Vector xbar(x2.size());
  for (std::size_t i = 0; i < x2.size(); ++i) xbar[i] = x2[i] - grad_x2[i] / lip;
  return prob.prox->generalized_projection(xbar, 2.0 * prob.rho_scale / lip);
}

}  // namespace detail

/// One APG iteration: proximal-gradient step at the extrapolated point with
/// constant step 1/L, then the momentum update
/// t+ = (1 + sqrt(1+4t^2))/2,  x2+ = x1+ + ((t-1)/t+)(x1+ - x1).
inline ApgState apg_step(const ApgState& state, const ApgProblem& prob) {
  Vector grad = prob.smooth.gradient(state.x2);
  if (!all_finite(grad)) throw NumericError("apg_step: non-finite gradient");
  Vector x1_new = detail::apg_prox_step(prob, state.x2, grad);

  const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.t * state.t));
  const double theta = (state.t - 1.0) / t_new;
  Vector x2_new(x1_new.size());
  for (std::size_t i = 0; i < x1_new.size(); ++i)
    x2_new[i] = x1_new[i] + theta * (x1_new[i] - state.x1[i]);

  return ApgState{std::move(x1_new), std::move(x2_new), t_new, state.iter + 1};
}

/// Run APG until the stopping rule fires. The gradient rule certifies a
/// composite subgradient: q = grad(x1+) - grad(x2) - L(x1+ - x2) lies in
/// d(rho_bar+gamma)(x1+) + N_chi(x1+) by the prox optimality condition.
inline ApgResult apg_minimize(const ApgProblem& prob, const StoppingRule& stop,
                              std::size_t hard_cap = 10'000'000) {
  prob.validate();
  if (!stop.max_iters_cap && !stop.grad_threshold)
    throw InvalidParameter("apg_minimize: empty stopping rule");

  const double lip = prob.smooth.lipschitz;
  ApgState state = ApgState::initial(prob.start);
  double last_cert = std::numeric_limits<double>::quiet_NaN();
  std::size_t walk_cooldown = 0;
  std::size_t stagnant_iters = 0;
  double best_stagnant_cert = std::numeric_limits<double>::infinity();
  Vector best_stagnant_x, best_stagnant_q;

  auto finish = [&](ApgStopReason reason, double cert) {
    ApgResult res;
    res.x = state.x1;
    res.iters = state.iter;
    res.stop_reason = reason;
    res.cert_norm = cert;
    if (stop.dist_bound > 0.0) {
      const double denom = static_cast<double>(state.iter + 1);
      res.gap_bound = 2.0 * lip * stop.dist_bound * stop.dist_bound / (denom * denom);
    }
    return res;
  };

  while (true) {
    if (stop.max_iters_cap && state.iter >= *stop.max_iters_cap)
      return finish(ApgStopReason::MaxIters, last_cert);
    if (state.iter >= hard_cap)
      throw NonconvergenceError(
          "apg_minimize: stopping rule did not fire within hard cap (iters=" +
          std::to_string(state.iter) + ", last certificate norm=" + std::to_string(last_cert) +
          ", threshold=" + std::to_string(stop.grad_threshold.value_or(-1.0)) + ")");

    Vector grad_x2 = prob.smooth.gradient(state.x2);
    if (!all_finite(grad_x2)) throw NumericError("apg_minimize: non-finite gradient");
    Vector x1_new = detail::apg_prox_step(prob, state.x2, grad_x2);

    if (stop.grad_threshold) {
      Vector grad_new = prob.smooth.gradient(x1_new);
      Vector q(x1_new.size());
      double qq = 0.0;
      for (std::size_t i = 0; i < x1_new.size(); ++i) {
        q[i] = grad_new[i] - grad_x2[i] - lip * (x1_new[i] - state.x2[i]);
        qq += q[i] * q[i];
      }
      last_cert = std::sqrt(qq);
      if (last_cert <= *stop.grad_threshold) {
        state.x1 = std::move(x1_new);
        ++state.iter;
        ApgResult res = finish(ApgStopReason::GradCertificate, last_cert);
        res.cert_vector = std::move(q);
        return res;
      }
      // Numerically stationary but the threshold sits below float resolution
      // (it decays geometrically across outer iterations). The momentum
      // recursion can cycle within an ulp and never produce an exactly zero
      // certificate, so walk the plain proximal-gradient map: at a bitwise
      // fixed point u the certificate for the step based at u is exactly 0.
      if (last_cert <= 1e-12 && *stop.grad_threshold >= 0.0 && walk_cooldown == 0) {
        Vector u = x1_new;
        Vector gu = prob.smooth.gradient(u);
        for (int walk = 0; walk < 64; ++walk) {
          Vector u_next = detail::apg_prox_step(prob, u, gu);
          ++state.iter;
          if (u_next == u) {
            state.x1 = std::move(u_next);
            ApgResult res = finish(ApgStopReason::GradCertificate, 0.0);
            res.cert_vector = zeros(state.x1.size());
            return res;
          }
          u = std::move(u_next);
          gu = prob.smooth.gradient(u);
        }
        walk_cooldown = 256;
      }
      if (walk_cooldown > 0) --walk_cooldown;

      // Gradient evaluation carries an absolute rounding floor; when the
      // certificate sits below `stagnation_floor` for many iterations but the
      // threshold is even smaller, no further digits are obtainable in this
      // precision. Return the best certified point and report its norm.
      if (stop.stagnation_floor > 0.0) {
        if (last_cert <= stop.stagnation_floor) {
          if (last_cert < best_stagnant_cert) {
            best_stagnant_cert = last_cert;
            best_stagnant_x = x1_new;
            best_stagnant_q = q;
          }
          if (++stagnant_iters >= 50) {
            state.x1 = std::move(best_stagnant_x);
            ++state.iter;
            ApgResult res = finish(ApgStopReason::Stagnation, best_stagnant_cert);
            res.cert_vector = std::move(best_stagnant_q);
            return res;
          }
        } else {
          stagnant_iters = 0;
        }
      }
    }

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.t * state.t));
    const double theta = (state.t - 1.0) / t_new;
    Vector x2_new(x1_new.size());
    for (std::size_t i = 0; i < x1_new.size(); ++i)
      x2_new[i] = x1_new[i] + theta * (x1_new[i] - state.x1[i]);
    state.x1 = std::move(x1_new);
    state.x2 = std::move(x2_new);
    state.t = t_new;
    ++state.iter;
  }
}

}  // namespace alcc
