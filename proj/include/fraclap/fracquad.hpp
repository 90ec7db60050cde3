// Quadrature data for the singular-in-time integral defining the fractional
// operator: Gamma(-s) prefactor, midpoint (low order) and piecewise-linear
// (high order) weights, tail weight, and N_t selection rules.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraclap {

enum class Scheme { Low, High };

/// One quadrature instance over the time grid t_j = j*dt, j = 1..n_t, plus
/// the analytic tail beyond t2.
struct QuadWeights {
  Scheme scheme = Scheme::Low;
  double s = 0.0;
  double dt = 0.0;
  long n_t = 0;
  std::vector<double> betas;  // betas[j-1] multiplies (w(t_j) - w(0))
  double beta_inf = 0.0;
  double gamma_prefactor = 0.0;  // 1/Gamma(-s), negative for s in (0,1)
  double t2 = 0.0;               // tail cutoff
};

/// Gamma(-s) for s in (0,1) via Gamma(-s) = Gamma(2-s)/(s(s-1)).
inline double gamma_neg(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("gamma_neg: s must be in (0,1)");
  return std::tgamma(2.0 - s) / (s * (s - 1.0));
}

namespace detail {

inline void check_weight_args(double s, double dt, bool allow_extreme_s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("weights: s must be in (0,1)");
  if (!allow_extreme_s && (s < 0.01 || s > 0.99))
    throw std::invalid_argument(
        "weights: s outside [0.01, 0.99] needs the explicit override "
        "(Gamma(-s) conditioning degrades near the endpoints)");
  if (!(dt > 0.0)) throw std::invalid_argument("weights: dt must be > 0");
}

// antiderivative data of the high-order weights
inline double hi_F(double t, double s) {
  return std::pow(t, 1.0 - s) / (s * (s - 1.0));
}
inline double hi_Fp(double t, double s) { return -1.0 / (s * std::pow(t, s)); }

}  // namespace detail

/// Midpoint-rule weights: beta_j integrates dt/t^{1+s} over
/// [t_j - dt/2, t_j + dt/2]; the tail starts at (n_t + 1/2)*dt.
inline QuadWeights weights_low(double s, double dt, long n_t,
                               bool allow_extreme_s = false) {
  detail::check_weight_args(s, dt, allow_extreme_s);
  if (n_t < 1) throw std::invalid_argument("weights_low: n_t must be >= 1");
  QuadWeights qw;
  qw.scheme = Scheme::Low;
  qw.s = s;
  qw.dt = dt;
  qw.n_t = n_t;
  qw.betas.resize(n_t);
  for (long j = 1; j <= n_t; ++j) {
    const double tj = j * dt;
    qw.betas[j - 1] = (std::pow(tj - 0.5 * dt, -s) - std::pow(tj + 0.5 * dt, -s)) / s;
  }
  qw.t2 = (n_t + 0.5) * dt;
  qw.beta_inf = 1.0 / (s * std::pow(qw.t2, s));
  qw.gamma_prefactor = 1.0 / gamma_neg(s);
  return qw;
}

/// Piecewise-linear-interpolant weights of the high order scheme; the first
/// weight also absorbs the discretization of the singular part on [0, dt].
/// The tail starts at n_t*dt.
inline QuadWeights weights_high(double s, double dt, long n_t,
                                bool allow_extreme_s = false) {
  detail::check_weight_args(s, dt, allow_extreme_s);
  if (n_t < 2)
    throw std::invalid_argument("weights_high: n_t must be >= 2");
  QuadWeights qw;
  qw.scheme = Scheme::High;
  qw.s = s;
  qw.dt = dt;
  qw.n_t = n_t;
  qw.betas.resize(n_t);
  const double scale = std::pow(dt, -s);
  auto F = [s](double t) { return detail::hi_F(t, s); };
  auto Fp = [s](double t) { return detail::hi_Fp(t, s); };
  qw.betas[0] = scale * (1.0 / (1.0 - s) - Fp(1.0) + F(2.0) - F(1.0));
  for (long j = 2; j <= n_t - 1; ++j)
    qw.betas[j - 1] = scale * (F(j + 1.0) - 2.0 * F(j) + F(j - 1.0));
  qw.betas[n_t - 1] =
      scale * (Fp(static_cast<double>(n_t)) - F(static_cast<double>(n_t)) +
               F(static_cast<double>(n_t - 1)));
  qw.t2 = n_t * dt;
  qw.beta_inf = 1.0 / (s * std::pow(qw.t2, s));
  qw.gamma_prefactor = 1.0 / gamma_neg(s);
  return qw;
}

inline QuadWeights make_weights(Scheme scheme, double s, double dt, long n_t,
                                bool allow_extreme_s = false) {
  return scheme == Scheme::Low ? weights_low(s, dt, n_t, allow_extreme_s)
                               : weights_high(s, dt, n_t, allow_extreme_s);
}

/// Smallest N_t satisfying the scheme's tail bound
/// N_t >= c/(lambda_min*dt) * log(1/dt) with c = 1-s (low) or 2-s (high).
/// lambda_min is the first nonzero eigenvalue of the operator, or any
/// positive lower bound for it.
inline long choose_nt(Scheme scheme, double s, double dt, double lambda_min) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("choose_nt: s must be in (0,1)");
  if (!(lambda_min > 0.0))
    throw std::invalid_argument("choose_nt: lambda_min must be > 0");
  if (!(dt > 0.0 && dt < 1.0))
    throw std::invalid_argument(
        "choose_nt: rule requires dt in (0,1); pass n_t explicitly otherwise");
  const double c = scheme == Scheme::Low ? 1.0 - s : 2.0 - s;
  const double bound = c / (lambda_min * dt) * std::log(1.0 / dt);
  const long n = static_cast<long>(std::ceil(bound));
  const long floor = scheme == Scheme::High ? 2 : 1;
  return std::max(n, floor);
}

/// Steps the heat flow until it is steady up to tol_rel, returning the number
/// of steps taken. `advance` performs one step and returns the M-norm
/// distance of the new state to the steady state; dist0 is that distance for
/// the initial state. Throws once n_t_max steps are exceeded.
template <class Advance>
long adaptive_tail_nt(Advance&& advance, double dist0, double tol_rel,
                      long n_t_max = 1'000'000, long min_steps = 1) {
  if (!(tol_rel > 0.0))
    throw std::invalid_argument("adaptive_tail_nt: tol_rel must be > 0");
  long j = 0;
  while (true) {
    if (j >= n_t_max)
      throw std::runtime_error(
          "adaptive_tail_nt: step cap exceeded; input does not decay");
    const double dist = advance();
    ++j;
    if (j >= min_steps && dist <= tol_rel * dist0) return j;
  }
}

}  // namespace fraclap
