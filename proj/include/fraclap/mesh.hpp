// Quasi-uniform P1 meshes of intervals and convex polygons, with boundary
// identification, uniform red refinement and conformity checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fraclap {

using Point = std::array<double, 2>;

struct Mesh {
  int dim = 1;
  std::vector<Point> nodes;  // y coordinate is 0 in 1D
  // Node index tuples; entry [2] is -1 in 1D. 2D elements are
  // counterclockwise.
  std::vector<std::array<int, 3>> elements;
  std::vector<int> boundary_nodes;                 // sorted ascending
  std::vector<std::array<int, 2>> boundary_edges;  // 2D only
  double h_max = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  double element_measure(int e) const {
    const auto& el = elements[e];
    if (dim == 1) return nodes[el[1]][0] - nodes[el[0]][0];
    const Point &a = nodes[el[0]], &b = nodes[el[1]], &c = nodes[el[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  }

  double element_diameter(int e) const {
    const auto& el = elements[e];
    if (dim == 1) return element_measure(e);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Point &p = nodes[el[i]], &q = nodes[el[(i + 1) % 3]];
      d = std::max(d, std::hypot(q[0] - p[0], q[1] - p[1]));
    }
    return d;
  }
};

inline double domain_measure(const Mesh& m) {
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) total += m.element_measure(e);
  return total;
}

/// Uniform partition of [a, b] into n_cells elements. Nodes ascending, in
/// generation order.
inline Mesh generate_interval(double a, double b, int n_cells) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("generate_interval: non-finite bounds");
  if (a >= b) throw std::invalid_argument("generate_interval: requires a < b");
  if (n_cells < 1)
    throw std::invalid_argument("generate_interval: n_cells must be >= 1");
  Mesh m;
  m.dim = 1;
  m.nodes.reserve(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) {
    const double t = static_cast<double>(i) / n_cells;
    m.nodes.push_back({a + t * (b - a), 0.0});
  }
  m.nodes.front() = {a, 0.0};
  m.nodes.back() = {b, 0.0};
  for (int i = 0; i < n_cells; ++i) m.elements.push_back({i, i + 1, -1});
  m.boundary_nodes = {0, n_cells};
  m.h_max = 0.0;
  for (int e = 0; e < n_cells; ++e)
    m.h_max = std::max(m.h_max, m.element_measure(e));
  return m;
}

namespace detail {

inline void recompute_h_max(Mesh& m) {
  m.h_max = 0.0;
  for (int e = 0; e < m.n_elements(); ++e)
    m.h_max = std::max(m.h_max, m.element_diameter(e));
}

inline void rebuild_boundary_nodes(Mesh& m) {
  std::set<int> bset;
  for (const auto& be : m.boundary_edges) {
    bset.insert(be[0]);
    bset.insert(be[1]);
  }
  m.boundary_nodes.assign(bset.begin(), bset.end());
}

}  // namespace detail

/// Splits every triangle into 4 congruent children via edge midpoints.
/// Quadruples the element count and halves all diameters.
inline Mesh refine_red(const Mesh& parent) {
  if (parent.dim != 2)
    throw std::invalid_argument("refine_red: requires a 2D mesh");
  Mesh m;
  m.dim = 2;
  m.nodes = parent.nodes;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Point& pa = m.nodes[a];
    const Point& pb = m.nodes[b];
    m.nodes.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    const int idx = m.n_nodes() - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& el : parent.elements) {
    const int v0 = el[0], v1 = el[1], v2 = el[2];
    const int m01 = mid(v0, v1), m12 = mid(v1, v2), m02 = mid(v0, v2);
    m.elements.push_back({v0, m01, m02});
    m.elements.push_back({m01, v1, m12});
    m.elements.push_back({m02, m12, v2});
    m.elements.push_back({m01, m12, m02});
  }
  for (const auto& be : parent.boundary_edges) {
    const int mm = mid(be[0], be[1]);
    m.boundary_edges.push_back({be[0], mm});
    m.boundary_edges.push_back({mm, be[1]});
  }
  detail::rebuild_boundary_nodes(m);
  detail::recompute_h_max(m);
  return m;
}

/// Fan triangulation of a strictly convex counterclockwise polygon from its
/// centroid, followed by `refinements` rounds of red refinement.
inline Mesh generate_convex_polygon(const std::vector<Point>& vertices,
                                    int refinements) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3)
    throw std::invalid_argument("generate_convex_polygon: need >= 3 vertices");
  if (refinements < 0)
    throw std::invalid_argument("generate_convex_polygon: refinements >= 0");
  for (int i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    const Point& c = vertices[(i + 2) % n];
    const double cross =
        (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (cross <= 0.0)
      throw std::invalid_argument(
          "generate_convex_polygon: vertices must form a strictly convex "
          "counterclockwise polygon");
  }
  // shoelace area and centroid
  double area2 = 0.0, cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    const double w = a[0] * b[1] - b[0] * a[1];
    area2 += w;
    cx += (a[0] + b[0]) * w;
    cy += (a[1] + b[1]) * w;
  }
  cx /= 3.0 * area2;
  cy /= 3.0 * area2;

  Mesh m;
  m.dim = 2;
  m.nodes = vertices;
  m.nodes.push_back({cx, cy});
  const int c = n;  // centroid index
  for (int i = 0; i < n; ++i) {
    m.elements.push_back({i, (i + 1) % n, c});
    m.boundary_edges.push_back({i, (i + 1) % n});
  }
  detail::rebuild_boundary_nodes(m);
  detail::recompute_h_max(m);
  for (int r = 0; r < refinements; ++r) m = refine_red(m);
  return m;
}

/// Measured constants of the quasi-uniformity assumption:
/// sigma = max_K h_K / rho_K and tau = min_K h_K / h_max.
inline std::pair<double, double> quasi_uniformity_report(const Mesh& m) {
  double sigma = 0.0;
  double h_min = std::numeric_limits<double>::infinity();
  for (int e = 0; e < m.n_elements(); ++e) {
    const double hk = m.element_diameter(e);
    h_min = std::min(h_min, hk);
    double rho;
    if (m.dim == 1) {
      rho = hk;
    } else {
      // inscribed circle diameter 4*area/perimeter
      const auto& el = m.elements[e];
      double per = 0.0;
      for (int i = 0; i < 3; ++i) {
        const Point &p = m.nodes[el[i]], &q = m.nodes[el[(i + 1) % 3]];
        per += std::hypot(q[0] - p[0], q[1] - p[1]);
      }
      rho = 4.0 * m.element_measure(e) / per;
    }
    sigma = std::max(sigma, hk / rho);
  }
  return {sigma, h_min / m.h_max};
}

/// Shared-face rule: every edge of a 2D mesh belongs to one element (and is
/// marked boundary) or to exactly two. 1D analogue on nodes.
inline bool is_conforming(const Mesh& m) {
  for (const auto& el : m.elements) {
    for (int i = 0; i < (m.dim == 1 ? 2 : 3); ++i)
      if (el[i] < 0 || el[i] >= m.n_nodes()) return false;
  }
  for (int e = 0; e < m.n_elements(); ++e)
    if (m.element_measure(e) <= 0.0) return false;
  if (m.dim == 1) {
    std::map<int, int> count;
    for (const auto& el : m.elements) {
      ++count[el[0]];
      ++count[el[1]];
    }
    for (const auto& [node, c] : count) {
      const bool on_boundary =
          std::find(m.boundary_nodes.begin(), m.boundary_nodes.end(), node) !=
          m.boundary_nodes.end();
      if (on_boundary ? c != 1 : c != 2) return false;
    }
    return true;
  }
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& el : m.elements)
    for (int i = 0; i < 3; ++i)
      ++edge_count[std::minmax(el[i], el[(i + 1) % 3])];
  std::set<std::pair<int, int>> marked;
  for (const auto& be : m.boundary_edges) marked.insert(std::minmax(be[0], be[1]));
  for (const auto& [edge, c] : edge_count) {
    if (c == 1) {
      if (!marked.count(edge)) return false;
    } else if (c == 2) {
      if (marked.count(edge)) return false;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace fraclap
