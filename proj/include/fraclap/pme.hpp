// Explicit solver for the fractional porous-medium equation
// du/dtau + Theta_h^s(u^m) = 0 on a Dirichlet space, with the
// boundary-behavior comparison against the scaled first eigenfunction.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fraclap/fracop.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

struct PmeState {
  double tau = 0.0;
  FieldVector u;
  int m = 2;
  double s = 0.5;
};

/// Holds the assembled operators so the fractional Laplacian inside the
/// explicit update is evaluated without re-assembly per step.
class PmeSolver {
 public:
  PmeSolver(const FeSpace& sp, int m, double s, FracConfig cfg)
      : sp_(&sp), m_(m), cfg_(std::move(cfg)) {
    if (m < 2) throw std::invalid_argument("PmeSolver: m must be an integer > 1");
    if (sp.bc.kind != BoundaryCondition::Kind::Dirichlet)
      throw std::invalid_argument("PmeSolver: Dirichlet boundary condition only");
    cfg_.s = s;
    cfg_.bc = sp.bc;
    cfg_.validate();
    mass_ = assemble_mass(sp);
    stiffness_ = assemble_stiffness(sp);
  }

  /// CFL-type restriction dtau <= h^{2s}/m of the explicit update.
  double dtau_max() const {
    return std::pow(sp_->mesh->h_max, 2.0 * cfg_.s) / m_;
  }

  /// Forward-Euler update u <- u - dtau * Theta_h^s(u^m), with the
  /// nonlinearity evaluated nodally.
  PmeState step(const PmeState& state, double dtau) const {
    if (state.m != m_ || state.s != cfg_.s)
      throw std::invalid_argument("PmeSolver::step: state built for another run");
    if (!(dtau > 0.0) || dtau > dtau_max() * (1.0 + 1e-12))
      throw std::invalid_argument(
          "PmeSolver::step: dtau violates the CFL restriction h^{2s}/m");
    FieldVector powered(state.u.size());
    for (std::size_t i = 0; i < state.u.size(); ++i) {
      double v = 1.0;
      for (int q = 0; q < m_; ++q) v *= state.u[i];
      if (!std::isfinite(v))
        throw std::runtime_error("PmeSolver::step: overflow in nodal power");
      powered[i] = v;
    }
    const ApplyResult frac =
        detail::apply_fractional_core(*sp_, mass_, stiffness_, powered, cfg_);
    PmeState next = state;
    next.tau += dtau;
    for (std::size_t i = 0; i < next.u.size(); ++i)
      next.u[i] -= dtau * frac.values[i];
    return next;
  }

  /// Runs with dtau = h^{2s}/m until tau_end, recording states at the
  /// requested tau values (each snapshot is the first state at or past it).
  std::pair<PmeState, std::vector<PmeState>> run(
      const FieldVector& u0, double tau_end,
      const std::vector<double>& snapshot_taus = {}) const {
    PmeState state{0.0, u0, m_, cfg_.s};
    std::vector<PmeState> snapshots;
    std::size_t next_snap = 0;
    auto record = [&](const PmeState& st) {
      while (next_snap < snapshot_taus.size() &&
             st.tau >= snapshot_taus[next_snap] - 1e-12) {
        snapshots.push_back(st);
        ++next_snap;
      }
    };
    record(state);
    const double dtau = dtau_max();
    while (state.tau < tau_end - 1e-12) {
      state = step(state, dtau);
      record(state);
    }
    return {state, snapshots};
  }

  const FracConfig& config() const { return cfg_; }

 private:
  const FeSpace* sp_;
  int m_;
  FracConfig cfg_;
  CsrMatrix mass_, stiffness_;
};

/// Empirical constants (c0, c1) of u(x,tau) ~ v(x,tau) :=
/// phi_1(x)^{1/m}/tau^{1/(m-1)}: min and max of u/v over the interior band
/// where the normalized first Dirichlet eigenfunction exceeds 1e-6.
inline std::pair<double, double> boundary_behavior_ratio(const FeSpace& sp,
                                                         const PmeState& state) {
  if (!(state.tau > 0.0))
    throw std::invalid_argument("boundary_behavior_ratio: requires tau > 0");
  const Mesh& m = *sp.mesh;
  if (m.dim != 1)
    throw std::invalid_argument("boundary_behavior_ratio: 1D only");
  const double a = m.nodes.front()[0], b = m.nodes.back()[0];
  EigenPair pair = eig_1d(BoundaryCondition::dirichlet(), b - a, 1);
  const double tau_scale = std::pow(state.tau, 1.0 / (state.m - 1.0));
  double c0 = std::numeric_limits<double>::infinity();
  double c1 = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < sp.n_dofs; ++d) {
    const double x = m.nodes[sp.node_of_dof[d]][0];
    const double phi = pair.phi(x - a, 0.0);
    if (phi < 1e-6) continue;
    const double v = std::pow(phi, 1.0 / state.m) / tau_scale;
    const double ratio = state.u[d] / v;
    c0 = std::min(c0, ratio);
    c1 = std::max(c1, ratio);
  }
  if (!std::isfinite(c0) || !std::isfinite(c1))
    throw std::runtime_error("boundary_behavior_ratio: empty evaluation band");
  return {c0, c1};
}

}  // namespace fraclap
