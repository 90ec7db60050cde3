// Theta-scheme time stepping for the homogeneous-BC heat equation,
// CFL validation and steady states.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fraclap/fem.hpp"
#include "fraclap/linalg.hpp"

namespace fraclap {

inline double mass_norm(const CsrMatrix& mass, const FieldVector& x) {
  return std::sqrt(dot(x, spmv(mass, x)));
}

/// Upper bound on the largest generalized eigenvalue of (A, M), via a
/// Gershgorin row bound on the lumped-mass preconditioned stiffness. For P1
/// elements M >= M_lumped/(dim+2), which makes the bound safe.
inline double generalized_eigen_bound(const CsrMatrix& mass,
                                      const CsrMatrix& stiffness, int dim) {
  double bound = 0.0;
  for (int i = 0; i < stiffness.n_rows; ++i) {
    double row_abs = 0.0;
    for (auto k = stiffness.row_offsets[i]; k < stiffness.row_offsets[i + 1];
         ++k)
      row_abs += std::abs(stiffness.values[k]);
    double lumped = 0.0;
    for (auto k = mass.row_offsets[i]; k < mass.row_offsets[i + 1]; ++k)
      lumped += mass.values[k];
    if (lumped <= 0.0)
      throw std::invalid_argument("generalized_eigen_bound: bad mass matrix");
    bound = std::max(bound, row_abs / lumped);
  }
  return (dim + 2) * bound;
}

/// Throws unless dt satisfies the stability restriction for theta < 1/2.
inline void check_cfl(const CsrMatrix& mass, const CsrMatrix& stiffness,
                      int dim, double theta, double dt) {
  if (theta >= 0.5) return;
  const double lambda_bound = generalized_eigen_bound(mass, stiffness, dim);
  if (dt * lambda_bound * (1.0 - 2.0 * theta) > 2.0)
    throw std::invalid_argument(
        "heat: CFL violated for theta < 1/2: dt too large for this mesh");
}

/// One step of (M + theta*dt*A) W = (M + (theta-1)*dt*A) W_prev, with the two
/// matrices prebuilt so long runs reuse them. CG warm-starts from the
/// previous solution.
class ThetaStepper {
 public:
  ThetaStepper(const CsrMatrix& mass, const CsrMatrix& stiffness, double theta,
               double dt, double tol = 1e-12)
      : lhs_(csr_combine(1.0, mass, theta * dt, stiffness)),
        rhs_(csr_combine(1.0, mass, (theta - 1.0) * dt, stiffness)),
        tol_(tol) {
    if (theta < 0.0 || theta > 1.0)
      throw std::invalid_argument("ThetaStepper: theta must be in [0, 1]");
    if (dt <= 0.0) throw std::invalid_argument("ThetaStepper: dt must be > 0");
  }

  void advance(FieldVector& w) {
    spmv_into(rhs_, w, scratch_);
    cg_solve(lhs_, scratch_, w, tol_);
  }

 private:
  CsrMatrix lhs_, rhs_;
  double tol_;
  FieldVector scratch_;
};

/// Single theta step assembling the system matrices on the fly.
inline FieldVector theta_step(const CsrMatrix& mass, const CsrMatrix& stiffness,
                              double theta, double dt,
                              const FieldVector& w_prev, double tol = 1e-12) {
  if (mass.n_rows != stiffness.n_rows || mass.n_cols != stiffness.n_cols)
    throw std::invalid_argument("theta_step: dimension mismatch");
  ThetaStepper stepper(mass, stiffness, theta, dt, tol);
  FieldVector w = w_prev;
  stepper.advance(w);
  return w;
}

struct HeatRun {
  double theta = 1.0;
  double dt = 0.0;
  std::vector<FieldVector> snapshots;  // snapshot j is W^(j) at t_j = j*dt
};

inline HeatRun run_heat(const FeSpace& sp, const FieldVector& u0, double theta,
                        double dt, long n_steps, double tol = 1e-12) {
  if (n_steps < 0) throw std::invalid_argument("run_heat: n_steps >= 0");
  const CsrMatrix mass = assemble_mass(sp);
  const CsrMatrix stiffness = assemble_stiffness(sp);
  check_cfl(mass, stiffness, sp.mesh->dim, theta, dt);
  HeatRun run;
  run.theta = theta;
  run.dt = dt;
  run.snapshots.reserve(n_steps + 1);
  run.snapshots.push_back(u0);
  if (n_steps == 0) return run;
  ThetaStepper stepper(mass, stiffness, theta, dt, tol);
  FieldVector w = u0;
  for (long j = 0; j < n_steps; ++j) {
    stepper.advance(w);
    run.snapshots.push_back(w);
  }
  return run;
}

/// Steady state of the heat flow: zero for Dirichlet/Robin, the conserved
/// mean (1^T M u0)/|Omega| for Neumann.
inline FieldVector steady_state(const FeSpace& sp, const FieldVector& u0) {
  if (static_cast<int>(u0.size()) != sp.n_dofs)
    throw std::invalid_argument("steady_state: dimension mismatch");
  if (sp.bc.kind != BoundaryCondition::Kind::Neumann)
    return FieldVector(sp.n_dofs, 0.0);
  const CsrMatrix mass = assemble_mass(sp);
  const FieldVector ones(sp.n_dofs, 1.0);
  const FieldVector m_u0 = spmv(mass, u0);
  const double volume = dot(ones, spmv(mass, ones));
  const double mean = dot(ones, m_u0) / volume;
  return FieldVector(sp.n_dofs, mean);
}

}  // namespace fraclap
