// P1 finite element core: DOF maps for Dirichlet/Neumann/Robin spaces,
// mass/stiffness assembly, L2 projection, norms and point evaluation.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fraclap/linalg.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// Scalar function on the closure of the domain; the second argument is
/// ignored in 1D.
using ScalarFn = std::function<double(double, double)>;

struct BoundaryCondition {
  enum class Kind { Dirichlet, Neumann, Robin };
  Kind kind = Kind::Dirichlet;
  ScalarFn robin_kappa;  // present iff kind == Robin; must be > 0 on boundary

  static BoundaryCondition dirichlet() { return {Kind::Dirichlet, nullptr}; }
  static BoundaryCondition neumann() { return {Kind::Neumann, nullptr}; }
  static BoundaryCondition robin(double kappa) {
    return robin([kappa](double, double) { return kappa; });
  }
  static BoundaryCondition robin(ScalarFn kappa) {
    if (!kappa) throw std::invalid_argument("robin: kappa required");
    return {Kind::Robin, std::move(kappa)};
  }
};

/// P1 space on a mesh. Dirichlet eliminates boundary nodes from the DOF map.
struct FeSpace {
  const Mesh* mesh = nullptr;
  BoundaryCondition bc;
  std::vector<int> dof_of_node;  // -1 for eliminated nodes
  std::vector<int> node_of_dof;
  int n_dofs = 0;
};

inline FeSpace make_space(const Mesh& mesh, BoundaryCondition bc) {
  FeSpace sp;
  sp.mesh = &mesh;
  sp.bc = std::move(bc);
  sp.dof_of_node.assign(mesh.n_nodes(), -1);
  std::vector<bool> on_boundary(mesh.n_nodes(), false);
  for (int b : mesh.boundary_nodes) on_boundary[b] = true;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (sp.bc.kind == BoundaryCondition::Kind::Dirichlet && on_boundary[i])
      continue;
    sp.dof_of_node[i] = sp.n_dofs++;
    sp.node_of_dof.push_back(i);
  }
  return sp;
}

namespace quad {

// 5-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 5> gauss5_x = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
    0.9061798459386640};
inline constexpr std::array<double, 5> gauss5_w = {
    0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
    0.47862867049936647, 0.23692688505618908};

// 2-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 2> gauss2_x = {-0.5773502691896257,
                                                   0.5773502691896257};

// 7-point degree-5 rule on the reference triangle (barycentric, weights sum
// to 1).
struct TriPoint {
  double l0, l1, l2, w;
};
inline constexpr std::array<TriPoint, 7> tri7 = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115,
     0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115,
     0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770,
     0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456,
     0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456,
     0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087,
     0.125939180544827},
}};

}  // namespace quad

namespace detail {

inline void check_element(const Mesh& m, int e) {
  if (m.element_measure(e) <= 0.0)
    throw std::invalid_argument("degenerate element in mesh");
}

/// Visits element quadrature points: cb(element, x, y, weight, barycentric
/// coordinates of the element's local nodes).
template <class Cb>
void for_each_quad_point(const Mesh& m, Cb&& cb) {
  if (m.dim == 1) {
    for (int e = 0; e < m.n_elements(); ++e) {
      check_element(m, e);
      const double x0 = m.nodes[m.elements[e][0]][0];
      const double x1 = m.nodes[m.elements[e][1]][0];
      const double len = x1 - x0;
      for (int q = 0; q < 5; ++q) {
        const double t = 0.5 * (quad::gauss5_x[q] + 1.0);
        const double x = x0 + t * len;
        const double w = 0.5 * quad::gauss5_w[q] * len;
        const std::array<double, 3> lambda = {1.0 - t, t, 0.0};
        cb(e, x, 0.0, w, lambda);
      }
    }
  } else {
    for (int e = 0; e < m.n_elements(); ++e) {
      check_element(m, e);
      const auto& el = m.elements[e];
      const Point &a = m.nodes[el[0]], &b = m.nodes[el[1]], &c = m.nodes[el[2]];
      const double area = m.element_measure(e);
      for (const auto& qp : quad::tri7) {
        const double x = qp.l0 * a[0] + qp.l1 * b[0] + qp.l2 * c[0];
        const double y = qp.l0 * a[1] + qp.l1 * b[1] + qp.l2 * c[1];
        const std::array<double, 3> lambda = {qp.l0, qp.l1, qp.l2};
        cb(e, x, y, qp.w * area, lambda);
      }
    }
  }
}

}  // namespace detail

/// Mass matrix M_ij = <phi_i, phi_j> from the exact P1 element integrals.
inline CsrMatrix assemble_mass(const FeSpace& sp) {
  const Mesh& m = *sp.mesh;
  CsrBuilder builder(sp.n_dofs, sp.n_dofs);
  for (int e = 0; e < m.n_elements(); ++e) {
    detail::check_element(m, e);
    const auto& el = m.elements[e];
    const double meas = m.element_measure(e);
    const int nv = m.dim == 1 ? 2 : 3;
    const double diag = m.dim == 1 ? meas / 3.0 : meas / 6.0;
    const double off = m.dim == 1 ? meas / 6.0 : meas / 12.0;
    for (int i = 0; i < nv; ++i) {
      const int di = sp.dof_of_node[el[i]];
      if (di < 0) continue;
      for (int j = 0; j < nv; ++j) {
        const int dj = sp.dof_of_node[el[j]];
        if (dj < 0) continue;
        builder.add(di, dj, i == j ? diag : off);
      }
    }
  }
  return builder.build();
}

/// Stiffness matrix A_ij = a(phi_i, phi_j); the Robin form adds the boundary
/// integral of kappa*phi_i*phi_j (2-point Gauss per boundary edge, point
/// masses at the endpoints in 1D).
inline CsrMatrix assemble_stiffness(const FeSpace& sp) {
  const Mesh& m = *sp.mesh;
  CsrBuilder builder(sp.n_dofs, sp.n_dofs);
  for (int e = 0; e < m.n_elements(); ++e) {
    detail::check_element(m, e);
    const auto& el = m.elements[e];
    if (m.dim == 1) {
      const double len = m.element_measure(e);
      const double k = 1.0 / len;
      const std::array<std::array<double, 2>, 2> ke = {{{k, -k}, {-k, k}}};
      for (int i = 0; i < 2; ++i) {
        const int di = sp.dof_of_node[el[i]];
        if (di < 0) continue;
        for (int j = 0; j < 2; ++j) {
          const int dj = sp.dof_of_node[el[j]];
          if (dj < 0) continue;
          builder.add(di, dj, ke[i][j]);
        }
      }
    } else {
      const Point &a = m.nodes[el[0]], &b = m.nodes[el[1]], &c = m.nodes[el[2]];
      const double area = m.element_measure(e);
      // grad phi_i = perpendicular of the opposite edge / (2*area)
      const std::array<std::array<double, 2>, 3> grad = {{
          {(b[1] - c[1]) / (2 * area), (c[0] - b[0]) / (2 * area)},
          {(c[1] - a[1]) / (2 * area), (a[0] - c[0]) / (2 * area)},
          {(a[1] - b[1]) / (2 * area), (b[0] - a[0]) / (2 * area)},
      }};
      for (int i = 0; i < 3; ++i) {
        const int di = sp.dof_of_node[el[i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int dj = sp.dof_of_node[el[j]];
          if (dj < 0) continue;
          builder.add(di, dj,
                      area * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]));
        }
      }
    }
  }
  if (sp.bc.kind == BoundaryCondition::Kind::Robin) {
    const auto& kappa = sp.bc.robin_kappa;
    auto sample = [&](double x, double y) {
      const double k = kappa(x, y);
      if (k <= 0.0)
        throw std::invalid_argument(
            "assemble_stiffness: Robin kappa must be positive on the boundary");
      return k;
    };
    if (m.dim == 1) {
      for (int bn : m.boundary_nodes) {
        const int d = sp.dof_of_node[bn];
        if (d >= 0) builder.add(d, d, sample(m.nodes[bn][0], 0.0));
      }
    } else {
      for (const auto& be : m.boundary_edges) {
        const Point &p = m.nodes[be[0]], &q = m.nodes[be[1]];
        const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
        const std::array<int, 2> dofs = {sp.dof_of_node[be[0]],
                                         sp.dof_of_node[be[1]]};
        for (double t : quad::gauss2_x) {
          const double l1 = 0.5 * (t + 1.0);
          const double l0 = 1.0 - l1;
          const double x = l0 * p[0] + l1 * q[0];
          const double y = l0 * p[1] + l1 * q[1];
          const double w = 0.5 * len * sample(x, y);
          const std::array<double, 2> phi = {l0, l1};
          for (int i = 0; i < 2; ++i) {
            if (dofs[i] < 0) continue;
            for (int j = 0; j < 2; ++j) {
              if (dofs[j] < 0) continue;
              builder.add(dofs[i], dofs[j], w * phi[i] * phi[j]);
            }
          }
        }
      }
    }
  }
  return builder.build();
}

/// Load vector b_i = integral of u * phi_i via element quadrature.
inline FieldVector assemble_load(const FeSpace& sp, const ScalarFn& u) {
  FieldVector b(sp.n_dofs, 0.0);
  const Mesh& m = *sp.mesh;
  detail::for_each_quad_point(
      m, [&](int e, double x, double y, double w,
             const std::array<double, 3>& lambda) {
        const double uv = u(x, y);
        const int nv = m.dim == 1 ? 2 : 3;
        for (int i = 0; i < nv; ++i) {
          const int d = sp.dof_of_node[m.elements[e][i]];
          if (d >= 0) b[d] += w * uv * lambda[i];
        }
      });
  return b;
}

/// L2 projection onto the space: solves M c = (u, phi_i).
inline FieldVector l2_project(const FeSpace& sp, const ScalarFn& u,
                              double tol = 1e-12) {
  const CsrMatrix mass = assemble_mass(sp);
  const FieldVector b = assemble_load(sp, u);
  return cg_solve(mass, b, tol).first;
}

/// Per-node values of an FE coefficient vector; eliminated Dirichlet nodes
/// read as 0.
inline std::vector<double> nodal_values(const FeSpace& sp,
                                        const FieldVector& coeffs) {
  if (static_cast<int>(coeffs.size()) != sp.n_dofs)
    throw std::invalid_argument("nodal_values: coefficient size mismatch");
  std::vector<double> vals(sp.mesh->n_nodes(), 0.0);
  for (int d = 0; d < sp.n_dofs; ++d) vals[sp.node_of_dof[d]] = coeffs[d];
  return vals;
}

/// ||u_exact - u_h||_{L2} by the same element quadrature as l2_project.
inline double l2_norm_error(const FeSpace& sp, const FieldVector& coeffs,
                            const ScalarFn& u_exact) {
  const Mesh& m = *sp.mesh;
  const std::vector<double> vals = nodal_values(sp, coeffs);
  double acc = 0.0;
  detail::for_each_quad_point(
      m, [&](int e, double x, double y, double w,
             const std::array<double, 3>& lambda) {
        double uh = 0.0;
        const int nv = m.dim == 1 ? 2 : 3;
        for (int i = 0; i < nv; ++i) uh += lambda[i] * vals[m.elements[e][i]];
        const double diff = u_exact(x, y) - uh;
        acc += w * diff * diff;
      });
  return std::sqrt(acc);
}

/// ||f||_{L2(Omega)} by element quadrature.
inline double l2_norm(const Mesh& m, const ScalarFn& f) {
  double acc = 0.0;
  detail::for_each_quad_point(m, [&](int, double x, double y, double w,
                                     const std::array<double, 3>&) {
    const double v = f(x, y);
    acc += w * v * v;
  });
  return std::sqrt(acc);
}

namespace detail {

inline bool barycentric_in_element(const Mesh& m, int e, double x, double y,
                                   std::array<double, 3>& lambda,
                                   double tol = 1e-10) {
  const auto& el = m.elements[e];
  if (m.dim == 1) {
    const double x0 = m.nodes[el[0]][0], x1 = m.nodes[el[1]][0];
    const double len = x1 - x0;
    const double t = (x - x0) / len;
    if (t < -tol / len || t > 1.0 + tol / len) return false;
    lambda = {1.0 - t, t, 0.0};
    return true;
  }
  const Point &a = m.nodes[el[0]], &b = m.nodes[el[1]], &c = m.nodes[el[2]];
  const double area2 = 2.0 * m.element_measure(e);
  const double l0 =
      ((b[0] - x) * (c[1] - y) - (c[0] - x) * (b[1] - y)) / area2;
  const double l1 =
      ((c[0] - x) * (a[1] - y) - (a[0] - x) * (c[1] - y)) / area2;
  const double l2 = 1.0 - l0 - l1;
  const double slack = tol / std::sqrt(area2);
  if (l0 < -slack || l1 < -slack || l2 < -slack) return false;
  lambda = {l0, l1, l2};
  return true;
}

}  // namespace detail

/// Barycentric P1 interpolation at arbitrary points of the closed domain.
inline std::vector<double> evaluate(const FeSpace& sp,
                                    const FieldVector& coeffs,
                                    const std::vector<Point>& points) {
  const Mesh& m = *sp.mesh;
  const std::vector<double> vals = nodal_values(sp, coeffs);
  std::vector<double> out;
  out.reserve(points.size());
  int hint = 0;
  for (const Point& p : points) {
    std::array<double, 3> lambda;
    int found = -1;
    if (detail::barycentric_in_element(m, hint, p[0], p[1], lambda)) {
      found = hint;
    } else {
      for (int e = 0; e < m.n_elements(); ++e) {
        if (detail::barycentric_in_element(m, e, p[0], p[1], lambda)) {
          found = e;
          break;
        }
      }
    }
    if (found < 0)
      throw std::invalid_argument("evaluate: point outside the domain");
    hint = found;
    double v = 0.0;
    const int nv = m.dim == 1 ? 2 : 3;
    for (int i = 0; i < nv; ++i)
      v += lambda[i] * vals[m.elements[found][i]];
    out.push_back(v);
  }
  return out;
}

/// FE function with an element cache, usable as a ScalarFn.
class FeField {
 public:
  FeField(const FeSpace& sp, FieldVector coeffs)
      : mesh_(sp.mesh), values_(nodal_values(sp, coeffs)) {}
  FeField(const Mesh& mesh, std::vector<double> node_values)
      : mesh_(&mesh), values_(std::move(node_values)) {
    if (static_cast<int>(values_.size()) != mesh.n_nodes())
      throw std::invalid_argument("FeField: one value per node required");
  }

  double operator()(double x, double y) const {
    std::array<double, 3> lambda;
    int found = -1;
    if (detail::barycentric_in_element(*mesh_, hint_, x, y, lambda)) {
      found = hint_;
    } else {
      for (int e = 0; e < mesh_->n_elements(); ++e) {
        if (detail::barycentric_in_element(*mesh_, e, x, y, lambda)) {
          found = e;
          break;
        }
      }
    }
    if (found < 0)
      throw std::invalid_argument("FeField: point outside the domain");
    hint_ = found;
    double v = 0.0;
    const int nv = mesh_->dim == 1 ? 2 : 3;
    for (int i = 0; i < nv; ++i)
      v += lambda[i] * values_[mesh_->elements[found][i]];
    return v;
  }

  const std::vector<double>& node_values() const { return values_; }

 private:
  const Mesh* mesh_;
  std::vector<double> values_;
  mutable int hint_ = 0;
};

}  // namespace fraclap
