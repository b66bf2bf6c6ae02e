#pragma once

#include <vector>

#include <Eigen/Core>

namespace wgeig {

/// Quadrature on a reference element.
///
/// Triangle rules live on the reference triangle (0,0), (1,0), (0,1) with
/// weights summing to 1/2; edge rules live on [0,1] with weights summing to 1.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;  // edge rules use points[i].x() only
  std::vector<double> weights;
  int exactness = 0;

  std::size_t size() const { return weights.size(); }
};

/// Highest exactness degree accepted by the rule generators.
inline constexpr int kMaxQuadratureDegree = 60;

/// Gauss-Legendre nodes and weights on [0,1] with n points.
QuadratureRule gauss_legendre(int n);

/// Edge rule on [0,1] exact for polynomials of the given degree.
QuadratureRule quadrature_edge(int exactness);

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle exact for the
/// given total degree.
QuadratureRule quadrature_triangle(int exactness);

/// Shared, lazily built instances of the rules above.
const QuadratureRule& cached_edge_rule(int exactness);
const QuadratureRule& cached_triangle_rule(int exactness);

}  // namespace wgeig
