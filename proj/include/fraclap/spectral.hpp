// Analytic eigenpairs of the Laplacian on intervals and the unit square for
// Dirichlet, Neumann and Robin boundary conditions; used as exact references
// through (-Laplacian)^s phi = lambda^s phi.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fraclap/fem.hpp"

namespace fraclap {

struct EigenPair {
  int m = 1;
  int l = 0;  // second index in 2D, 0 in 1D
  double lambda = 0.0;
  ScalarFn phi;  // L2-normalized on its domain
  bool normalized = true;
};

/// Root a_m of the Robin transcendental equation
/// (2a/(kL)) cos a + (1 - (a/(kL))^2) sin a = 0 on ((m-1)pi, m pi),
/// by bisection refined with Newton.
inline double robin_root(double kappa, double L, int m) {
  if (!(kappa > 0.0) || !(L > 0.0))
    throw std::invalid_argument("robin_root: kappa and L must be > 0");
  if (m < 1) throw std::invalid_argument("robin_root: m must be >= 1");
  const double kl = kappa * L;
  auto f = [kl](double a) {
    return (2.0 * a / kl) * std::cos(a) +
           (1.0 - (a / kl) * (a / kl)) * std::sin(a);
  };
  auto fp = [kl](double a) {
    // d/da of the above
    return (2.0 / kl) * std::cos(a) - (2.0 * a / kl) * std::sin(a) -
           (2.0 * a / (kl * kl)) * std::sin(a) +
           (1.0 - (a / kl) * (a / kl)) * std::cos(a);
  };
  const double pi = std::numbers::pi;
  const double eps = 1e-12;  // keep away from the sin zeros at the endpoints
  double lo = (m - 1) * pi + eps;
  double hi = m * pi - eps;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw std::runtime_error("robin_root: no sign change in the bracket");
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double step = f(a) / fp(a);
    const double next = a - step;
    if (next <= lo - 1e-12 || next >= hi + 1e-12) break;
    a = next;
    if (std::abs(step) < 1e-15) break;
  }
  return a;
}

namespace detail {

/// L2 norm of f on (0, L) by composite 5-point Gauss (400 panels).
inline double l2_norm_interval(const std::function<double(double)>& f,
                               double L) {
  constexpr int panels = 400;
  double acc = 0.0;
  const double hp = L / panels;
  for (int p = 0; p < panels; ++p) {
    const double x0 = p * hp;
    for (int q = 0; q < 5; ++q) {
      const double x = x0 + 0.5 * (quad::gauss5_x[q] + 1.0) * hp;
      const double v = f(x);
      acc += 0.5 * quad::gauss5_w[q] * hp * v * v;
    }
  }
  return std::sqrt(acc);
}

inline double constant_robin_kappa(const BoundaryCondition& bc) {
  if (bc.kind != BoundaryCondition::Kind::Robin || !bc.robin_kappa)
    throw std::invalid_argument("expected a Robin boundary condition");
  return bc.robin_kappa(0.0, 0.0);
}

}  // namespace detail

/// Analytic eigenpair of -Laplacian on (0, L). Robin assumes constant kappa.
inline EigenPair eig_1d(const BoundaryCondition& bc, double L, int m) {
  if (!(L > 0.0)) throw std::invalid_argument("eig_1d: L must be > 0");
  if (m < 1) throw std::invalid_argument("eig_1d: m must be >= 1");
  const double pi = std::numbers::pi;
  EigenPair pair;
  pair.m = m;
  switch (bc.kind) {
    case BoundaryCondition::Kind::Dirichlet: {
      const double k = m * pi / L;
      pair.lambda = k * k;
      const double norm = std::sqrt(2.0 / L);
      pair.phi = [k, norm](double x, double) { return norm * std::sin(k * x); };
      break;
    }
    case BoundaryCondition::Kind::Neumann: {
      const double k = (m - 1) * pi / L;
      pair.lambda = k * k;
      if (m == 1) {
        const double norm = std::sqrt(1.0 / L);
        pair.phi = [norm](double, double) { return norm; };
      } else {
        const double norm = std::sqrt(2.0 / L);
        pair.phi = [k, norm](double x, double) { return norm * std::cos(k * x); };
      }
      break;
    }
    case BoundaryCondition::Kind::Robin: {
      const double kappa = detail::constant_robin_kappa(bc);
      const double a = robin_root(kappa, L, m);
      const double k = a / L;
      pair.lambda = k * k;
      const double slope = a / (kappa * L);
      auto raw = [k, slope](double x) {
        return std::sin(k * x) + slope * std::cos(k * x);
      };
      const double norm = 1.0 / detail::l2_norm_interval(raw, L);
      pair.phi = [raw, norm](double x, double) { return norm * raw(x); };
      break;
    }
  }
  return pair;
}

/// Tensor eigenpair on the unit square: phi_ml(x,y) = phi_m(x)*phi_l(y),
/// lambda_ml = lambda_m + lambda_l.
inline EigenPair eig_2d_square(const BoundaryCondition& bc, int m, int l) {
  if (m < 1 || l < 1)
    throw std::invalid_argument("eig_2d_square: indices must be >= 1");
  const EigenPair px = eig_1d(bc, 1.0, m);
  const EigenPair py = eig_1d(bc, 1.0, l);
  EigenPair pair;
  pair.m = m;
  pair.l = l;
  pair.lambda = px.lambda + py.lambda;
  pair.phi = [fx = px.phi, fy = py.phi](double x, double y) {
    return fx(x, 0.0) * fy(y, 0.0);
  };
  return pair;
}

/// x -> lambda^s * phi(x), the exact fractional Laplacian of the eigenpair.
inline ScalarFn exact_fractional(const EigenPair& pair, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("exact_fractional: s must be in (0,1)");
  const double factor = pair.lambda == 0.0 ? 0.0 : std::pow(pair.lambda, s);
  return [factor, phi = pair.phi](double x, double y) {
    return factor * phi(x, y);
  };
}

/// First nonzero eigenvalue of -Laplacian on (0, L): lambda_1 for Dirichlet
/// and Robin, lambda_2 for Neumann.
inline double lambda_min_1d(const BoundaryCondition& bc, double L) {
  const int m = bc.kind == BoundaryCondition::Kind::Neumann ? 2 : 1;
  return eig_1d(bc, L, m).lambda;
}

/// First nonzero eigenvalue on the unit square.
inline double lambda_min_square(const BoundaryCondition& bc) {
  if (bc.kind == BoundaryCondition::Kind::Neumann)
    return eig_2d_square(bc, 2, 1).lambda;
  return eig_2d_square(bc, 1, 1).lambda;
}

}  // namespace fraclap
