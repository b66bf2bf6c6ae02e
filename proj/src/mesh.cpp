#include "wgeig/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>
#include <utility>

namespace wgeig {

namespace {

std::uint64_t next_lineage() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
         static_cast<std::uint64_t>(std::max(a, b));
}

// Builds a mesh from a list of grid squares given by integer lower-left
// corners (in units of `step`, offset by `origin`).
class GridBuilder {
 public:
  GridBuilder(double step, Point origin) : step_(step), origin_(std::move(origin)) {}

  void add_square(int i, int j, DiagonalPattern pattern) {
    const int a = node(2 * i, 2 * j);
    const int b = node(2 * i + 2, 2 * j);
    const int c = node(2 * i + 2, 2 * j + 2);
    const int d = node(2 * i, 2 * j + 2);
    switch (pattern) {
      case DiagonalPattern::right_up:
        triangles_.push_back({a, b, c});
        triangles_.push_back({a, c, d});
        break;
      case DiagonalPattern::right_down:
        triangles_.push_back({a, b, d});
        triangles_.push_back({b, c, d});
        break;
      case DiagonalPattern::crisscross: {
        const int m = node(2 * i + 1, 2 * j + 1);
        triangles_.push_back({a, b, m});
        triangles_.push_back({b, c, m});
        triangles_.push_back({c, d, m});
        triangles_.push_back({d, a, m});
        break;
      }
    }
  }

  Mesh finish() && { return Mesh(std::move(vertices_), std::move(triangles_)); }

 private:
  // Coordinates in half-steps so square centres are representable.
  int node(int hi, int hj) {
    auto [it, inserted] = index_.try_emplace({hi, hj}, static_cast<int>(vertices_.size()));
    if (inserted) {
      vertices_.emplace_back(origin_.x() + 0.5 * step_ * hi, origin_.y() + 0.5 * step_ * hj);
    }
    return it->second;
  }

  double step_;
  Point origin_;
  std::map<std::pair<int, int>, int> index_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
};

}  // namespace

std::string to_string(DiagonalPattern p) {
  switch (p) {
    case DiagonalPattern::right_up: return "right_up";
    case DiagonalPattern::right_down: return "right_down";
    case DiagonalPattern::crisscross: return "crisscross";
  }
  return "unknown";
}

DiagonalPattern parse_pattern(const std::string& name) {
  if (name == "right_up") return DiagonalPattern::right_up;
  if (name == "right_down") return DiagonalPattern::right_down;
  if (name == "crisscross") return DiagonalPattern::crisscross;
  throw std::invalid_argument("unknown triangulation pattern '" + name + "'");
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), lineage_(next_lineage()) {
  build_topology();
}

void Mesh::build_topology() {
  const int nt = num_triangles();
  areas_.resize(nt);
  diameters_.resize(nt);
  triangle_edges_.resize(nt);
  edges_.clear();

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(static_cast<std::size_t>(nt) * 2);
  h_ = 0.0;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    const Point& p0 = vertices_[tri[0]];
    const Point& p1 = vertices_[tri[1]];
    const Point& p2 = vertices_[tri[2]];
    const Point d1 = p1 - p0;
    const Point d2 = p2 - p0;
    areas_[t] = 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
    if (!(areas_[t] > 0.0)) {
      throw std::invalid_argument("triangle " + std::to_string(t) +
                                  " is degenerate or clockwise");
    }
    diameters_[t] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    h_ = std::max(h_, diameters_[t]);

    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
      if (inserted) {
        edges_.push_back(Edge{{std::min(a, b), std::max(a, b)}, {t, -1}});
      } else {
        Edge& e = edges_[it->second];
        if (e.triangles[1] >= 0) {
          throw std::invalid_argument("edge shared by more than two triangles");
        }
        e.triangles[1] = t;
      }
      triangle_edges_[t][i] = it->second;
    }
  }
  num_interior_edges_ = static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.boundary(); }));
}

double Mesh::edge_length(int e) const {
  const Edge& ed = edges_[e];
  return (vertices_[ed.vertices[1]] - vertices_[ed.vertices[0]]).norm();
}

Point Mesh::outward_normal(int t, int local_edge) const {
  const Point a = vertex(t, (local_edge + 1) % 3);
  const Point b = vertex(t, (local_edge + 2) % 3);
  const Point d = b - a;
  return Point(d.y(), -d.x()) / d.norm();
}

int Mesh::parent(int t) const {
  if (parents_.empty()) {
    throw AncestryError("mesh at level 0 has no parent triangles");
  }
  return parents_.back().at(t);
}

int Mesh::ancestor_at_level(int t, int lvl) const {
  if (lvl < 0 || lvl > level()) {
    throw AncestryError("requested level " + std::to_string(lvl) +
                        " outside ancestry range [0, " + std::to_string(level()) + "]");
  }
  if (t < 0 || t >= num_triangles()) {
    throw std::out_of_range("triangle index out of range");
  }
  for (int l = level() - 1; l >= lvl; --l) t = parents_[l][t];
  return t;
}

bool Mesh::descends_from(const Mesh& coarse) const {
  if (lineage_ != coarse.lineage_ || level() < coarse.level()) return false;
  // Every refinement multiplies the triangle count by 4.
  const long long expected = static_cast<long long>(coarse.num_triangles())
                             << (2 * (level() - coarse.level()));
  return expected == num_triangles();
}

Mesh Mesh::refine_uniform() const {
  const int nv = num_vertices();
  std::vector<Point> verts = vertices_;
  verts.reserve(nv + num_edges());
  for (const Edge& e : edges_) {
    verts.push_back(0.5 * (vertices_[e.vertices[0]] + vertices_[e.vertices[1]]));
  }

  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * triangles_.size());
  std::vector<int> parent_of;
  parent_of.reserve(4 * triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& v = triangles_[t];
    const auto& te = triangle_edges_[t];
    const int m0 = nv + te[0];
    const int m1 = nv + te[1];
    const int m2 = nv + te[2];
    tris.push_back({v[0], m2, m1});
    tris.push_back({m2, v[1], m0});
    tris.push_back({m1, m0, v[2]});
    tris.push_back({m0, m1, m2});
    parent_of.insert(parent_of.end(), 4, t);
  }

  Mesh fine(std::move(verts), std::move(tris));
  fine.parents_ = parents_;
  fine.parents_.push_back(std::move(parent_of));
  fine.lineage_ = lineage_;
  return fine;
}

void Mesh::write(std::ostream& os) const {
  os << "vertices " << num_vertices() << " triangles " << num_triangles() << '\n';
  os.precision(17);
  for (const Point& p : vertices_) os << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh build_unit_square(int n, DiagonalPattern pattern) {
  if (n < 1) throw std::invalid_argument("build_unit_square: n must be >= 1");
  GridBuilder grid(1.0 / n, Point(0.0, 0.0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) grid.add_square(i, j, pattern);
  return std::move(grid).finish();
}

Mesh build_l_shape(int n, DiagonalPattern pattern) {
  if (n < 1) throw std::invalid_argument("build_l_shape: n must be >= 1");
  GridBuilder grid(1.0 / n, Point(-1.0, -1.0));
  for (int j = 0; j < 2 * n; ++j) {
    for (int i = 0; i < 2 * n; ++i) {
      if (i >= n && j >= n) continue;  // removed quadrant [0,1)^2
      grid.add_square(i, j, pattern);
    }
  }
  return std::move(grid).finish();
}

}  // namespace wgeig
