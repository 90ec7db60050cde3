// Text I/O: the native ".flm" mesh format (exact round-trip) and the CSV
// emitters used by the command-line front end.
#pragma once

#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclap/fem.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

namespace detail {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string exact_decimal(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) return buf;
  }
  return buf;
}

}  // namespace detail

/// Writes the header `flm <dim> <n_nodes> <n_elems>`, node coordinates, the
/// element connectivity (0-based) and a `boundary` section.
inline void write_flm(std::ostream& out, const Mesh& m) {
  out << "flm " << m.dim << ' ' << m.nodes.size() << ' ' << m.elements.size()
      << '\n';
  for (const Point& p : m.nodes) {
    out << detail::exact_decimal(p[0]);
    if (m.dim == 2) out << ' ' << detail::exact_decimal(p[1]);
    out << '\n';
  }
  for (const auto& e : m.elements) {
    out << e[0] << ' ' << e[1];
    if (m.dim == 2) out << ' ' << e[2];
    out << '\n';
  }
  out << "boundary\n";
  if (m.dim == 1) {
    for (int n : m.boundary_nodes) out << n << '\n';
  } else {
    for (const auto& edge : m.boundary_edges)
      out << edge[0] << ' ' << edge[1] << '\n';
  }
}

inline std::string to_flm(const Mesh& m) {
  std::ostringstream out;
  write_flm(out, m);
  return out.str();
}

inline Mesh read_flm(std::istream& in) {
  std::string magic;
  int dim = 0;
  std::size_t n_nodes = 0, n_elems = 0;
  if (!(in >> magic >> dim >> n_nodes >> n_elems) || magic != "flm")
    throw std::runtime_error("read_flm: bad header; expected 'flm <dim> <n_nodes> <n_elems>'");
  if (dim != 1 && dim != 2)
    throw std::runtime_error("read_flm: dim must be 1 or 2");
  Mesh m;
  m.dim = dim;
  m.nodes.resize(n_nodes);
  for (auto& p : m.nodes) {
    p = {0.0, 0.0};
    if (!(in >> p[0])) throw std::runtime_error("read_flm: truncated node list");
    if (dim == 2 && !(in >> p[1]))
      throw std::runtime_error("read_flm: truncated node list");
  }
  m.elements.resize(n_elems);
  for (auto& e : m.elements) {
    e = {-1, -1, -1};
    const int per_elem = dim == 1 ? 2 : 3;
    for (int k = 0; k < per_elem; ++k) {
      if (!(in >> e[k]) || e[k] < 0 || e[k] >= static_cast<int>(n_nodes))
        throw std::runtime_error("read_flm: bad element connectivity");
    }
  }
  std::string section;
  if (!(in >> section) || section != "boundary")
    throw std::runtime_error("read_flm: missing 'boundary' section");
  if (dim == 1) {
    int n;
    while (in >> n) {
      if (n < 0 || n >= static_cast<int>(n_nodes))
        throw std::runtime_error("read_flm: boundary node out of range");
      m.boundary_nodes.push_back(n);
    }
  } else {
    int a, b;
    while (in >> a >> b) {
      if (a < 0 || b < 0 || a >= static_cast<int>(n_nodes) ||
          b >= static_cast<int>(n_nodes))
        throw std::runtime_error("read_flm: boundary edge out of range");
      m.boundary_edges.push_back({a, b});
    }
    detail::rebuild_boundary_nodes(m);
  }
  detail::recompute_h_max(m);
  return m;
}

inline Mesh from_flm(const std::string& text) {
  std::istringstream in(text);
  return read_flm(in);
}

/// Nodal CSV for an operator application: coordinates, input, output. One
/// row per mesh node; eliminated Dirichlet nodes show their boundary value 0.
inline void write_apply_csv(std::ostream& out, const FeSpace& sp,
                            const FieldVector& input,
                            const FieldVector& output) {
  const std::vector<double> in_vals = nodal_values(sp, input);
  const std::vector<double> out_vals = nodal_values(sp, output);
  const Mesh& m = *sp.mesh;
  out << (m.dim == 1 ? "x,input,output\n" : "x,y,input,output\n");
  out << std::setprecision(17);
  for (int i = 0; i < m.n_nodes(); ++i) {
    const Point& p = m.nodes[i];
    out << p[0];
    if (m.dim == 2) out << ',' << p[1];
    out << ',' << in_vals[i] << ',' << out_vals[i] << '\n';
  }
}

/// Snapshot CSV of a porous-medium state: the solution u against the scaled
/// eigenfunction v = phi_1^{1/m}/tau^{1/(m-1)} (zero column at tau = 0).
inline void write_pme_csv(std::ostream& out, const FeSpace& sp,
                          const FieldVector& u, double tau, int m_exponent,
                          const ScalarFn& phi1) {
  const std::vector<double> u_vals = nodal_values(sp, u);
  const Mesh& mesh = *sp.mesh;
  out << "x,u,v_scaled\n";
  out << std::setprecision(17);
  const double tau_scale =
      tau > 0.0 ? std::pow(tau, 1.0 / (m_exponent - 1.0)) : 0.0;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const Point& p = mesh.nodes[i];
    double v = 0.0;
    if (tau > 0.0) {
      const double phi = phi1(p[0], p[1]);
      v = phi > 0.0 ? std::pow(phi, 1.0 / m_exponent) / tau_scale : 0.0;
    }
    out << p[0] << ',' << u_vals[i] << ',' << v << '\n';
  }
}

}  // namespace fraclap
