#include <uipdg/quadrature.hpp>

namespace uipdg {

namespace {

#include "quadrature_tables.inc"

constexpr int kMaxPoints = 12;

int rule_offset(int n) { return n * (n - 1) / 2; }

int points_for_degree(int degree) {
  if (degree < 0)
    throw ConfigError("quadrature degree must be nonnegative");
  int n = (degree + 2) / 2; // 2n - 1 >= degree
  if (n < 1)
    n = 1;
  if (n > kMaxPoints)
    throw ConfigError("quadrature degree " + std::to_string(degree) +
                      " exceeds the embedded tables (max 23)");
  return n;
}

} // namespace

TriangleRule triangle_rule(int degree) {
  const int n = points_for_degree(degree);
  const int off = rule_offset(n);
  TriangleRule rule;
  rule.degree = 2 * n - 1;
  rule.nodes.reserve(static_cast<size_t>(n) * n);
  // Collapsed-square map from [-1,1]^2 to the reference triangle:
  //   x = (1 + a)(1 - b)/4,  y = (1 + b)/2,  dx dy = (1 - b)/8 da db.
  // The (1 - b) factor is absorbed by the Jacobi weight, leaving w/8.
  for (int j = 0; j < n; ++j) {
    const double b = kGaussJacobi10_nodes[off + j];
    const double wb = kGaussJacobi10_weights[off + j];
    for (int i = 0; i < n; ++i) {
      const double a = kGaussLegendre_nodes[off + i];
      const double wa = kGaussLegendre_weights[off + i];
      QuadratureNode node;
      node.x = (1.0 + a) * (1.0 - b) / 4.0;
      node.y = (1.0 + b) / 2.0;
      node.w = wa * wb / 8.0;
      rule.nodes.push_back(node);
    }
  }
  return rule;
}

EdgeRule edge_rule(int degree) {
  const int n = points_for_degree(degree);
  const int off = rule_offset(n);
  EdgeRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = (1.0 + kGaussLegendre_nodes[off + i]) / 2.0;
    rule.weights[i] = kGaussLegendre_weights[off + i] / 2.0;
  }
  return rule;
}

} // namespace uipdg
