// Discrete fractional operator: streaming accumulation of quadrature-weighted
// heat-flow differences, plus the harmonic-extension pipeline for
// non-homogeneous Dirichlet data.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fraclap/fem.hpp"
#include "fraclap/fracquad.hpp"
#include "fraclap/heat.hpp"
#include "fraclap/linalg.hpp"

namespace fraclap {

struct NtMode {
  enum class Kind { Formula, Adaptive };
  Kind kind = Kind::Formula;
  double lambda_min = 0.0;  // Formula: first nonzero eigenvalue (or a lower bound)
  double tol = 1e-8;        // Adaptive: relative steadiness tolerance

  static NtMode formula(double lambda_min) {
    return {Kind::Formula, lambda_min, 0.0};
  }
  static NtMode adaptive(double tol) { return {Kind::Adaptive, 0.0, tol}; }
};

/// Full experiment descriptor for one fractional-operator evaluation.
/// dt is derived as eta * h^p from the mesh of the space it is applied on.
struct FracConfig {
  double s = 0.5;
  BoundaryCondition bc = BoundaryCondition::dirichlet();
  double theta = 1.0;
  double eta = 0.001;
  double p = 1.0;
  Scheme scheme = Scheme::Low;
  NtMode nt_mode = NtMode::adaptive(1e-8);
  double solver_tol = 1e-12;
  long max_nt = 1'000'000;
  bool allow_extreme_s = false;
  static constexpr int k = 1;  // FE degree; fixed

  void validate() const {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("FracConfig: s must be in (0,1)");
    if (!allow_extreme_s && (s < 0.01 || s > 0.99))
      throw std::invalid_argument(
          "FracConfig: s outside [0.01, 0.99] needs allow_extreme_s");
    if (theta < 0.0 || theta > 1.0)
      throw std::invalid_argument("FracConfig: theta must be in [0,1]");
    if (!(eta > 0.0) || !(p > 0.0))
      throw std::invalid_argument("FracConfig: eta and p must be > 0");
    if (scheme == Scheme::Low) {
      if (theta < 0.5) {
        if (p < 2.0 || p > k + 1.0)
          throw std::invalid_argument(
              "FracConfig: low order with theta < 1/2 requires p in [2, k+1]");
      } else if (p > k + 1.0) {
        throw std::invalid_argument(
            "FracConfig: low order requires p in (0, k+1]");
      }
    } else {
      if (theta != 0.5)
        throw std::invalid_argument(
            "FracConfig: high order scheme requires the Crank-Nicolson step "
            "(theta = 1/2)");
      if (p > (k + 1.0) / 2.0)
        throw std::invalid_argument(
            "FracConfig: high order requires p in (0, (k+1)/2]");
    }
    if (nt_mode.kind == NtMode::Kind::Formula && !(nt_mode.lambda_min > 0.0))
      throw std::invalid_argument("FracConfig: formula mode needs lambda_min > 0");
    if (nt_mode.kind == NtMode::Kind::Adaptive && !(nt_mode.tol > 0.0))
      throw std::invalid_argument("FracConfig: adaptive mode needs tol > 0");
    if (!(solver_tol > 0.0))
      throw std::invalid_argument("FracConfig: solver_tol must be > 0");
    if (max_nt < 2) throw std::invalid_argument("FracConfig: max_nt too small");
  }
};

struct ApplyResult {
  FieldVector values;
  long n_t = 0;
  double dt = 0.0;
};

namespace detail {

/// Streaming evaluation of the quadrature sum
/// (1/Gamma(-s)) [sum_j (W^j - W^0) beta_j + (W_inf - W^0) beta_inf]
/// with prebuilt matrices, so batch callers reuse the assembly.
inline ApplyResult apply_fractional_core(const FeSpace& sp,
                                         const CsrMatrix& mass,
                                         const CsrMatrix& stiffness,
                                         const FieldVector& w0,
                                         const FracConfig& cfg) {
  cfg.validate();
  if (cfg.bc.kind != sp.bc.kind)
    throw std::invalid_argument(
        "apply_fractional: config and space boundary conditions disagree");
  if (static_cast<int>(w0.size()) != sp.n_dofs)
    throw std::invalid_argument("apply_fractional: datum size mismatch");
  const int n = sp.n_dofs;
  const double dt = cfg.eta * std::pow(sp.mesh->h_max, cfg.p);
  check_cfl(mass, stiffness, sp.mesh->dim, cfg.theta, dt);

  const FieldVector w_inf = steady_state(sp, w0);
  ThetaStepper stepper(mass, stiffness, cfg.theta, dt, cfg.solver_tol);
  FieldVector w = w0;
  FieldVector acc(n, 0.0);
  long n_t = 0;
  QuadWeights qw;

  if (cfg.nt_mode.kind == NtMode::Kind::Formula) {
    n_t = choose_nt(cfg.scheme, cfg.s, dt, cfg.nt_mode.lambda_min);
    if (n_t > cfg.max_nt)
      throw std::runtime_error(
          "apply_fractional: formula N_t exceeds the configured cap");
    qw = make_weights(cfg.scheme, cfg.s, dt, n_t, cfg.allow_extreme_s);
    for (long j = 1; j <= n_t; ++j) {
      stepper.advance(w);
      const double beta = qw.betas[j - 1];
      for (int i = 0; i < n; ++i) acc[i] += beta * (w[i] - w0[i]);
    }
  } else {
    // Interior high-order weights do not depend on n_t; only the final
    // weight does, so it is corrected once stepping halts.
    FieldVector diff(n);
    auto dist_to_steady = [&](const FieldVector& v) {
      for (int i = 0; i < n; ++i) diff[i] = v[i] - w_inf[i];
      return mass_norm(mass, diff);
    };
    const double dist0 = dist_to_steady(w0);
    const double scale = std::pow(dt, -cfg.s);
    auto interior_beta = [&](long j) {
      if (cfg.scheme == Scheme::Low) {
        const double tj = j * dt;
        return (std::pow(tj - 0.5 * dt, -cfg.s) -
                std::pow(tj + 0.5 * dt, -cfg.s)) /
               cfg.s;
      }
      if (j == 1)
        return scale * (1.0 / (1.0 - cfg.s) - hi_Fp(1.0, cfg.s) +
                        hi_F(2.0, cfg.s) - hi_F(1.0, cfg.s));
      return scale * (hi_F(j + 1.0, cfg.s) - 2.0 * hi_F(double(j), cfg.s) +
                      hi_F(j - 1.0, cfg.s));
    };
    long j = 0;
    const long min_steps = cfg.scheme == Scheme::High ? 2 : 1;
    auto advance = [&]() {
      stepper.advance(w);
      ++j;
      const double beta = interior_beta(j);
      for (int i = 0; i < n; ++i) acc[i] += beta * (w[i] - w0[i]);
      return dist_to_steady(w);
    };
    n_t = adaptive_tail_nt(advance, dist0, cfg.nt_mode.tol, cfg.max_nt,
                           min_steps);
    qw = make_weights(cfg.scheme, cfg.s, dt, n_t, cfg.allow_extreme_s);
    // replace the provisional interior weight of the last step
    const double correction = qw.betas[n_t - 1] - interior_beta(n_t);
    for (int i = 0; i < n; ++i) acc[i] += correction * (w[i] - w0[i]);
  }

  for (int i = 0; i < n; ++i)
    acc[i] = qw.gamma_prefactor * (acc[i] + qw.beta_inf * (w_inf[i] - w0[i]));
  return {std::move(acc), n_t, dt};
}

}  // namespace detail

/// Nodal coefficients of the discrete fractional operator applied to an
/// already-projected datum.
inline ApplyResult apply_fractional_detailed(const FeSpace& sp,
                                             const FieldVector& w0,
                                             const FracConfig& cfg) {
  const CsrMatrix mass = assemble_mass(sp);
  const CsrMatrix stiffness = assemble_stiffness(sp);
  return detail::apply_fractional_core(sp, mass, stiffness, w0, cfg);
}

inline FieldVector apply_fractional(const FeSpace& sp, const FieldVector& w0,
                                    const FracConfig& cfg) {
  return apply_fractional_detailed(sp, w0, cfg).values;
}

inline ApplyResult apply_fractional_detailed(const FeSpace& sp,
                                             const ScalarFn& u,
                                             const FracConfig& cfg) {
  const FieldVector w0 = l2_project(sp, u, cfg.solver_tol);
  return apply_fractional_detailed(sp, w0, cfg);
}

inline FieldVector apply_fractional(const FeSpace& sp, const ScalarFn& u,
                                    const FracConfig& cfg) {
  return apply_fractional_detailed(sp, u, cfg).values;
}

/// FE solution of Laplace's equation with Dirichlet data g interpolated at
/// the boundary nodes. Returns one value per mesh node.
inline std::vector<double> harmonic_extension(const Mesh& mesh,
                                              const ScalarFn& g,
                                              double tol = 1e-12) {
  const FeSpace full = make_space(mesh, BoundaryCondition::neumann());
  const FeSpace interior = make_space(mesh, BoundaryCondition::dirichlet());
  const CsrMatrix a_full = assemble_stiffness(full);  // pure grad-grad form

  std::vector<double> z(mesh.n_nodes(), 0.0);
  for (int b : mesh.boundary_nodes)
    z[b] = g(mesh.nodes[b][0], mesh.nodes[b][1]);

  // interior system A_II x = -A_IB g_B, rows taken from the full stiffness
  FieldVector rhs(interior.n_dofs, 0.0);
  for (int d = 0; d < interior.n_dofs; ++d) {
    const int node = interior.node_of_dof[d];
    double acc = 0.0;
    for (auto k = a_full.row_offsets[node]; k < a_full.row_offsets[node + 1];
         ++k) {
      const int col = a_full.col_indices[k];
      if (interior.dof_of_node[col] < 0) acc += a_full.values[k] * z[col];
    }
    rhs[d] = -acc;
  }
  const CsrMatrix a_ii = assemble_stiffness(interior);
  const FieldVector x = cg_solve(a_ii, rhs, tol).first;
  for (int d = 0; d < interior.n_dofs; ++d) z[interior.node_of_dof[d]] = x[d];
  return z;
}

/// L2 projection of u minus an FE function given by nodal values, evaluated
/// in-element (no point location).
inline FieldVector project_shifted(const FeSpace& sp, const ScalarFn& u,
                                   const std::vector<double>& z_nodes,
                                   double tol = 1e-12) {
  const Mesh& m = *sp.mesh;
  if (static_cast<int>(z_nodes.size()) != m.n_nodes())
    throw std::invalid_argument("project_shifted: one z value per node");
  FieldVector b(sp.n_dofs, 0.0);
  detail::for_each_quad_point(
      m, [&](int e, double x, double y, double w,
             const std::array<double, 3>& lambda) {
        const int nv = m.dim == 1 ? 2 : 3;
        double zh = 0.0;
        for (int i = 0; i < nv; ++i) zh += lambda[i] * z_nodes[m.elements[e][i]];
        const double val = u(x, y) - zh;
        for (int i = 0; i < nv; ++i) {
          const int d = sp.dof_of_node[m.elements[e][i]];
          if (d >= 0) b[d] += w * val * lambda[i];
        }
      });
  const CsrMatrix mass = assemble_mass(sp);
  return cg_solve(mass, b, tol).first;
}

/// Non-homogeneous Dirichlet pipeline: computes the discrete harmonic
/// extension of g and applies the fractional operator to the shifted datum
/// u - z_h. Requires trace(u) = g at the boundary nodes.
inline ApplyResult apply_fractional_nonhomogeneous(const FeSpace& sp,
                                                   const ScalarFn& u,
                                                   const ScalarFn& g,
                                                   const FracConfig& cfg) {
  if (sp.bc.kind != BoundaryCondition::Kind::Dirichlet)
    throw std::invalid_argument(
        "apply_fractional_nonhomogeneous: Dirichlet boundary condition only");
  const Mesh& m = *sp.mesh;
  for (int bnode : m.boundary_nodes) {
    const double x = m.nodes[bnode][0], y = m.nodes[bnode][1];
    if (std::abs(u(x, y) - g(x, y)) > 1e-8)
      throw std::invalid_argument(
          "apply_fractional_nonhomogeneous: trace of u does not match g");
  }
  const std::vector<double> z = harmonic_extension(m, g, cfg.solver_tol);
  const FieldVector w0 = project_shifted(sp, u, z, cfg.solver_tol);
  return apply_fractional_detailed(sp, w0, cfg);
}

}  // namespace fraclap
