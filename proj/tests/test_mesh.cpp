#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "wgeig/mesh.hpp"
#include "wgeig/polyspace.hpp"
#include "wgeig/quadrature.hpp"

using namespace wgeig;

namespace {

void check_invariants(const Mesh& m) {
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Point a = m.vertex(t, 0), b = m.vertex(t, 1), c = m.vertex(t, 2);
    const double signed_area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    CHECK(signed_area > 0.0);
    CHECK(m.area(t) == doctest::Approx(signed_area).epsilon(1e-14));
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    CHECK(m.diameter(t) == doctest::Approx(longest).epsilon(1e-14));
  }
  // Edge incidence recomputed from the triangle list.
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : m.triangles())
    for (int i = 0; i < 3; ++i) {
      const int u = tri[(i + 1) % 3], v = tri[(i + 2) % 3];
      ++count[{std::min(u, v), std::max(u, v)}];
    }
  CHECK(static_cast<int>(count.size()) == m.num_edges());
  int interior = 0;
  for (const Edge& e : m.edges()) {
    const int c = count.at({e.vertices[0], e.vertices[1]});
    CHECK(c == (e.boundary() ? 1 : 2));
    CHECK(e.vertices[0] < e.vertices[1]);
    interior += e.boundary() ? 0 : 1;
  }
  CHECK(interior == m.num_interior_edges());
  CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
}

double total_area(const Mesh& m) {
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) s += m.area(t);
  return s;
}

bool inside(const Mesh& m, int t, const Point& p, double tol) {
  for (int i = 0; i < 3; ++i) {
    const Point a = m.vertex(t, (i + 1) % 3), b = m.vertex(t, (i + 2) % 3);
    const double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
    if (cross < -tol * (b - a).norm()) return false;
  }
  return true;
}

std::set<std::pair<long, long>> vertex_keys(const Mesh& m) {
  std::set<std::pair<long, long>> s;
  for (const Point& p : m.vertices())
    s.insert({std::lround(p.x() * 1e9), std::lround(p.y() * 1e9)});
  return s;
}

}  // namespace

TEST_CASE("unit square builder counts") {
  const Mesh one = build_unit_square(1, DiagonalPattern::right_up);
  CHECK(one.num_triangles() == 2);
  CHECK(one.num_vertices() == 4);
  CHECK(one.num_edges() == 5);
  check_invariants(one);

  const Mesh four = build_unit_square(4, DiagonalPattern::right_up);
  CHECK(four.num_triangles() == 32);
  CHECK(four.h() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
  check_invariants(four);

  // 9 grid vertices plus one centre per square; 4 triangles per square.
  const Mesh cc = build_unit_square(2, DiagonalPattern::crisscross);
  CHECK(cc.num_triangles() == 16);
  CHECK(cc.num_vertices() == 13);
  check_invariants(cc);

  for (auto p : {DiagonalPattern::right_up, DiagonalPattern::right_down,
                 DiagonalPattern::crisscross}) {
    const Mesh m = build_unit_square(5, p);
    check_invariants(m);
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("right_down uses the other diagonal") {
  const Mesh m = build_unit_square(1, DiagonalPattern::right_down);
  const Edge* diag = nullptr;
  for (const Edge& e : m.edges())
    if (!e.boundary()) diag = &e;
  REQUIRE(diag != nullptr);
  const Point a = m.vertices()[diag->vertices[0]], b = m.vertices()[diag->vertices[1]];
  CHECK(std::abs(a.x() + a.y() - 1.0) < 1e-15);
  CHECK(std::abs(b.x() + b.y() - 1.0) < 1e-15);
}

TEST_CASE("L-shape builder counts") {
  CHECK(build_l_shape(1, DiagonalPattern::right_up).num_triangles() == 6);
  const Mesh two = build_l_shape(2, DiagonalPattern::right_up);
  CHECK(two.num_triangles() == 24);
  const bool corner = std::any_of(two.vertices().begin(), two.vertices().end(),
                                  [](const Point& p) { return p.norm() < 1e-15; });
  CHECK(corner);
  // 12 squares, 4 triangles each.
  CHECK(build_l_shape(2, DiagonalPattern::crisscross).num_triangles() == 48);
  for (auto p : {DiagonalPattern::right_up, DiagonalPattern::crisscross}) {
    const Mesh m = build_l_shape(3, p);
    check_invariants(m);
    CHECK(total_area(m) == doctest::Approx(3.0).epsilon(1e-14));
    for (const Point& v : m.vertices()) CHECK_FALSE((v.x() > 1e-12 && v.y() > 1e-12));
  }
}

TEST_CASE("local edges and outward normals") {
  const Mesh m = build_unit_square(3, DiagonalPattern::crisscross);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Point centroid = (m.vertex(t, 0) + m.vertex(t, 1) + m.vertex(t, 2)) / 3.0;
    for (int le = 0; le < 3; ++le) {
      const Edge& e = m.edges()[m.triangle_edges(t)[le]];
      const int opposite = m.triangles()[t][le];
      CHECK(e.vertices[0] != opposite);
      CHECK(e.vertices[1] != opposite);
      const Point mid = 0.5 * (m.vertices()[e.vertices[0]] + m.vertices()[e.vertices[1]]);
      const Point n = m.outward_normal(t, le);
      CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(n.dot(mid - centroid) > 0.0);
      CHECK(std::abs(n.dot(m.vertices()[e.vertices[1]] - m.vertices()[e.vertices[0]])) < 1e-14);
    }
  }
}

TEST_CASE("invalid triangles are rejected") {
  const std::vector<Point> v = {Point(0, 0), Point(1, 0), Point(0, 1)};
  CHECK_THROWS(Mesh(v, {{0, 2, 1}}));
  CHECK_THROWS(Mesh({Point(0, 0), Point(1, 0), Point(2, 0)}, {{0, 1, 2}}));
  CHECK_NOTHROW(Mesh(v, {{0, 1, 2}}));
}

TEST_CASE("red refinement") {
  const Mesh coarse = build_unit_square(1, DiagonalPattern::right_up);
  const Mesh fine = coarse.refine_uniform();
  CHECK(fine.num_triangles() == 8);
  CHECK(fine.level() == 1);
  CHECK(fine.h() == doctest::Approx(coarse.h() / 2).epsilon(1e-15));
  check_invariants(fine);
  std::vector<double> child_area(coarse.num_triangles(), 0.0);
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const int p = fine.parent(t);
    REQUIRE(p >= 0);
    REQUIRE(p < coarse.num_triangles());
    child_area[p] += fine.area(t);
    CHECK(fine.diameter(t) == doctest::Approx(coarse.diameter(p) / 2).epsilon(1e-14));
  }
  for (int p = 0; p < coarse.num_triangles(); ++p)
    CHECK(child_area[p] == doctest::Approx(coarse.area(p)).epsilon(1e-14));
  CHECK_THROWS_AS(coarse.parent(0), AncestryError);
}

TEST_CASE("twice refined grid matches the direct construction") {
  const Mesh m = build_unit_square(4, DiagonalPattern::right_up).refine_uniform().refine_uniform();
  CHECK(m.h() == doctest::Approx(std::sqrt(2.0) / 16).epsilon(1e-14));
  CHECK(m.level() == 2);
  const Mesh direct = build_unit_square(16, DiagonalPattern::right_up);
  CHECK(vertex_keys(m) == vertex_keys(direct));
  CHECK(m.num_triangles() == direct.num_triangles());
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("ancestry lookup") {
  const Mesh m0 = build_l_shape(1, DiagonalPattern::right_up);
  const Mesh m1 = m0.refine_uniform();
  const Mesh m2 = m1.refine_uniform();

  for (int t = 0; t < m2.num_triangles(); ++t) CHECK(m2.ancestor_at_level(t, 2) == t);
  for (int t = 0; t < m1.num_triangles(); ++t) CHECK(m1.ancestor_at_level(t, 0) == m1.parent(t));

  // Grandchildren: 16 per root triangle, centroids inside the root.
  std::vector<int> count(m0.num_triangles(), 0);
  for (int t = 0; t < m2.num_triangles(); ++t) {
    const int a = m2.ancestor_at_level(t, 0);
    ++count[a];
    const Point c = (m2.vertex(t, 0) + m2.vertex(t, 1) + m2.vertex(t, 2)) / 3.0;
    CHECK(inside(m0, a, c, 1e-12));
  }
  for (int c : count) CHECK(c == 16);

  CHECK_THROWS_AS(m2.ancestor_at_level(0, 3), AncestryError);
  CHECK_THROWS_AS(m2.ancestor_at_level(0, -1), AncestryError);

  CHECK(m2.descends_from(m0));
  CHECK(m2.descends_from(m1));
  CHECK(m2.descends_from(m2));
  CHECK_FALSE(m0.descends_from(m2));
  CHECK_FALSE(m2.descends_from(build_l_shape(1, DiagonalPattern::right_up)));
}

TEST_CASE("fine quadrature points lie in their ancestors") {
  const Mesh m0 = build_unit_square(2, DiagonalPattern::crisscross);
  const Mesh m2 = m0.refine_uniform().refine_uniform();
  const QuadratureRule& rule = cached_triangle_rule(8);
  for (int t = 0; t < m2.num_triangles(); ++t) {
    const int a = m2.ancestor_at_level(t, 0);
    for (const auto& r : rule.points) CHECK(inside(m0, a, map_to_triangle(m2, t, r), 1e-12));
  }
}

TEST_CASE("refined boundary covers the coarse boundary") {
  const Mesh coarse = build_l_shape(2, DiagonalPattern::right_down);
  const Mesh fine = coarse.refine_uniform();
  double coarse_len = 0.0, fine_len = 0.0;
  for (int e = 0; e < coarse.num_edges(); ++e)
    if (coarse.edges()[e].boundary()) coarse_len += coarse.edge_length(e);
  for (int e = 0; e < fine.num_edges(); ++e) {
    if (!fine.edges()[e].boundary()) continue;
    fine_len += fine.edge_length(e);
    const Point mid = 0.5 * (fine.vertices()[fine.edges()[e].vertices[0]] +
                             fine.vertices()[fine.edges()[e].vertices[1]]);
    bool on_coarse = false;
    for (const Edge& ce : coarse.edges()) {
      if (!ce.boundary()) continue;
      const Point a = coarse.vertices()[ce.vertices[0]], b = coarse.vertices()[ce.vertices[1]];
      const double cross = (b - a).x() * (mid - a).y() - (b - a).y() * (mid - a).x();
      const double s = (mid - a).dot(b - a) / (b - a).squaredNorm();
      if (std::abs(cross) < 1e-12 && s > 0.0 && s < 1.0) on_coarse = true;
    }
    CHECK(on_coarse);
  }
  CHECK(fine_len == doctest::Approx(coarse_len).epsilon(1e-13));
}

TEST_CASE("plain-text export") {
  const Mesh m = build_unit_square(1, DiagonalPattern::right_up);
  std::ostringstream os;
  m.write(os);
  std::istringstream in(os.str());
  std::string w1, w2;
  int nv = 0, nt = 0;
  in >> w1 >> nv >> w2 >> nt;
  CHECK(w1 == "vertices");
  CHECK(w2 == "triangles");
  CHECK(nv == 4);
  CHECK(nt == 2);
  double x, y;
  for (int i = 0; i < nv; ++i) {
    in >> x >> y;
    CHECK(x == m.vertices()[i].x());
    CHECK(y == m.vertices()[i].y());
  }
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      int idx;
      in >> idx;
      CHECK(idx == m.triangles()[t][i]);
    }
}

TEST_CASE("pattern names round-trip") {
  for (auto p : {DiagonalPattern::right_up, DiagonalPattern::right_down,
                 DiagonalPattern::crisscross})
    CHECK(parse_pattern(to_string(p)) == p);
  CHECK_THROWS_AS(parse_pattern("diagonal"), std::invalid_argument);
}
