#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wgeig {

using Point = Eigen::Vector2d;

/// Triangulation pattern used to split each grid square.
enum class DiagonalPattern {
  right_up,    ///< diagonal from lower-left to upper-right
  right_down,  ///< diagonal from upper-left to lower-right
  crisscross,  ///< both diagonals, centre vertex added (4 triangles per square)
};

std::string to_string(DiagonalPattern p);
DiagonalPattern parse_pattern(const std::string& name);

/// Raised when a triangle has no recorded ancestor at the requested level.
class AncestryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  std::array<int, 2> vertices;   // vertices[0] < vertices[1]
  std::array<int, 2> triangles;  // triangles[1] == -1 on the boundary
  bool boundary() const { return triangles[1] < 0; }
};

/// Immutable triangulation with edge topology and refinement ancestry.
///
/// Local edge i of a triangle is the edge opposite its local vertex i.
/// Triangles are stored counter-clockwise.
class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_interior_edges() const { return num_interior_edges_; }

  /// Global edge ids of the three local edges of triangle t.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  Point vertex(int t, int local) const { return vertices_[triangles_[t][local]]; }

  double area(int t) const { return areas_[t]; }
  /// Diameter h_T (longest edge).
  double diameter(int t) const { return diameters_[t]; }
  /// Global mesh size h = max h_T.
  double h() const { return h_; }
  double edge_length(int e) const;

  /// Outward unit normal of triangle t on its local edge.
  Point outward_normal(int t, int local_edge) const;

  int level() const { return static_cast<int>(parents_.size()); }
  /// Parent of triangle t at level()-1; throws AncestryError at level 0.
  int parent(int t) const;
  /// Triangle at `level` that contains triangle t.
  int ancestor_at_level(int t, int level) const;

  /// Identifier shared by a root mesh and every mesh refined from it.
  std::uint64_t lineage() const { return lineage_; }
  /// True if this mesh was obtained from `coarse` by zero or more refinements.
  bool descends_from(const Mesh& coarse) const;

  /// Red refinement: every triangle split into 4 congruent children.
  Mesh refine_uniform() const;

  /// Plain-text dump: "vertices V triangles T" header, coordinates, index triples.
  void write(std::ostream& os) const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double h_ = 0.0;
  int num_interior_edges_ = 0;

  // parents_[l][t] is the parent (at level l) of triangle t at level l+1.
  std::vector<std::vector<int>> parents_;
  std::uint64_t lineage_ = 0;
};

/// n x n squares on (0,1)^2.
Mesh build_unit_square(int n, DiagonalPattern pattern = DiagonalPattern::right_up);

/// (-1,1)^2 without [0,1)^2, n squares per unit length (3n^2 squares).
Mesh build_l_shape(int n, DiagonalPattern pattern = DiagonalPattern::right_up);

inline Mesh refine_uniform(const Mesh& mesh) { return mesh.refine_uniform(); }

}  // namespace wgeig
