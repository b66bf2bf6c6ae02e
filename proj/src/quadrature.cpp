#include "wgeig/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace wgeig {

namespace {

void check_degree(int exactness) {
  if (exactness < 0 || exactness > kMaxQuadratureDegree) {
    throw std::invalid_argument("unsupported quadrature exactness " + std::to_string(exactness));
  }
}

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess; nodes on
  // [-1,1] are symmetric so only half are computed.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, q] = legendre_pair(n, x);
      const double dx = p / (n * (x * p - q) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, q] = legendre_pair(n, x);
    const double dp = n * (x * p - q) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map to [0,1]
    rule.points[i] = Eigen::Vector2d(0.5 * (1.0 - x), 0.0);
    rule.points[n - 1 - i] = Eigen::Vector2d(0.5 * (1.0 + x), 0.0);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule quadrature_edge(int exactness) {
  check_degree(exactness);
  QuadratureRule rule = gauss_legendre(exactness / 2 + 1);
  rule.exactness = std::max(exactness, rule.exactness);
  return rule;
}

QuadratureRule quadrature_triangle(int exactness) {
  check_degree(exactness);
  // x = u, y = v (1 - u), Jacobian (1 - u): degree d in (x,y) becomes degree
  // d + 1 in u and d in v.
  const int n = (exactness + 2 + 1) / 2;
  const QuadratureRule g = gauss_legendre(n);
  QuadratureRule rule;
  rule.exactness = 2 * n - 2;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int a = 0; a < n; ++a) {
    const double u = g.points[a].x();
    for (int b = 0; b < n; ++b) {
      const double v = g.points[b].x();
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(g.weights[a] * g.weights[b] * (1.0 - u));
    }
  }
  return rule;
}

const QuadratureRule& cached_edge_rule(int exactness) {
  check_degree(exactness);
  static const std::vector<QuadratureRule> table = [] {
    std::vector<QuadratureRule> rules;
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) rules.push_back(quadrature_edge(d));
    return rules;
  }();
  return table[exactness];
}

const QuadratureRule& cached_triangle_rule(int exactness) {
  check_degree(exactness);
  static const std::vector<QuadratureRule> table = [] {
    std::vector<QuadratureRule> rules;
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) rules.push_back(quadrature_triangle(d));
    return rules;
  }();
  return table[exactness];
}

}  // namespace wgeig
