#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fraclap/mesh.hpp"

using namespace fraclap;

namespace {

const std::vector<Point> kSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const std::vector<Point> kPentagon = {
    {0.0, 0.0}, {1.0, 0.0}, {1.3, 0.8}, {0.5, 1.4}, {-0.3, 0.7}};

double shoelace(const std::vector<Point>& v) {
  double a2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    a2 += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a2;
}

}  // namespace

TEST_CASE("interval generation: endpoints, lengths, boundary") {
  const Mesh m = generate_interval(0.0, 1.0, 4);
  CHECK(m.dim == 1);
  CHECK(m.n_nodes() == 5);
  CHECK(m.n_elements() == 4);
  CHECK(m.nodes.front()[0] == 0.0);
  CHECK(m.nodes.back()[0] == 1.0);
  CHECK(m.h_max == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m.boundary_nodes == std::vector<int>{0, 4});
  CHECK(is_conforming(m));

  // paper-scale mesh used by the porous-medium experiment
  const Mesh fine = generate_interval(-1.0, 1.0, 1000);
  CHECK(fine.n_nodes() == 1001);
  CHECK(fine.h_max == doctest::Approx(0.002).epsilon(1e-12));
  CHECK(domain_measure(fine) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interval generation rejects bad input") {
  CHECK_THROWS_AS(generate_interval(1.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(generate_interval(0.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(generate_interval(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_interval(0.0, std::nan(""), 4),
                  std::invalid_argument);
}

TEST_CASE("unit square fan mesh and red refinement") {
  const Mesh fan = generate_convex_polygon(kSquare, 0);
  CHECK(fan.dim == 2);
  CHECK(fan.n_elements() == 4);
  CHECK(fan.n_nodes() == 5);
  CHECK(domain_measure(fan) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_conforming(fan));

  const Mesh r3 = generate_convex_polygon(kSquare, 3);
  CHECK(r3.n_elements() == 256);
  CHECK(r3.h_max == doctest::Approx(fan.h_max / 8.0).epsilon(1e-13));
  CHECK(domain_measure(r3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_conforming(r3));
}

TEST_CASE("red refinement quadruples elements and halves h_max") {
  Mesh m = generate_convex_polygon(kPentagon, 0);
  const double area = shoelace(kPentagon);
  const auto [sigma0, tau0] = quasi_uniformity_report(m);
  for (int r = 0; r < 3; ++r) {
    const Mesh child = refine_red(m);
    CHECK(child.n_elements() == 4 * m.n_elements());
    CHECK(child.h_max == doctest::Approx(m.h_max / 2.0).epsilon(1e-13));
    CHECK(domain_measure(child) == doctest::Approx(area).epsilon(1e-12));
    CHECK(is_conforming(child));
    // children are similar to their parents, so sigma is preserved
    const auto [sigma, tau] = quasi_uniformity_report(child);
    CHECK(sigma == doctest::Approx(sigma0).epsilon(1e-12));
    CHECK(tau > 0.0);
    m = child;
  }
  CHECK_THROWS_AS(refine_red(generate_interval(0, 1, 4)),
                  std::invalid_argument);
}

TEST_CASE("pentagon mesh keeps quasi-uniformity under refinement") {
  const Mesh fan = generate_convex_polygon(kPentagon, 0);
  const Mesh fine = generate_convex_polygon(kPentagon, 3);
  const auto [sigma_fan, tau_fan] = quasi_uniformity_report(fan);
  const auto [sigma_fine, tau_fine] = quasi_uniformity_report(fine);
  CHECK(sigma_fine <= 2.0 * sigma_fan);
  CHECK(is_conforming(fine));
}

TEST_CASE("polygon generation rejects non-convex and degenerate input") {
  CHECK_THROWS_AS(generate_convex_polygon({{0, 0}, {1, 0}}, 0),
                  std::invalid_argument);
  // clockwise square
  CHECK_THROWS_AS(generate_convex_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 0),
                  std::invalid_argument);
  // reflex vertex
  CHECK_THROWS_AS(generate_convex_polygon(
                      {{0, 0}, {1, 0}, {0.5, 0.1}, {1, 1}, {0, 1}}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_convex_polygon(kSquare, -1), std::invalid_argument);
}

TEST_CASE("quasi-uniformity report") {
  const auto [sigma1, tau1] =
      quasi_uniformity_report(generate_interval(0, 1, 8));
  CHECK(sigma1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(tau1 == doctest::Approx(1.0).epsilon(1e-13));

  // fan triangles of the unit square: legs sqrt(2)/2, hypotenuse 1,
  // area 1/4 -> rho = 4*area/perimeter, sigma = h/rho
  const Mesh fan = generate_convex_polygon(kSquare, 0);
  const double per = 1.0 + std::sqrt(2.0);
  const double expected_sigma = 1.0 / (4.0 * 0.25 / per);
  const auto [sigma2, tau2] = quasi_uniformity_report(fan);
  CHECK(sigma2 == doctest::Approx(expected_sigma).epsilon(1e-13));
  CHECK(tau2 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("conformity check detects broken meshes") {
  Mesh bad = generate_convex_polygon(kSquare, 1);
  bad.elements.pop_back();  // leaves an unmarked single-count edge
  CHECK_FALSE(is_conforming(bad));

  Mesh inverted = generate_convex_polygon(kSquare, 0);
  std::swap(inverted.elements[0][0], inverted.elements[0][1]);
  CHECK_FALSE(is_conforming(inverted));
}
