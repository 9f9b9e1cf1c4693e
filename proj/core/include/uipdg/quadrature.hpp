// Quadrature rules on the reference triangle and the reference edge.
//
// Triangle rules are conical products of a Gauss-Legendre rule and a
// Gauss-Jacobi rule with weight (1-x), pushed through the collapsed-square
// map, so all nodes are strictly interior.  Edge rules are Gauss-Legendre
// on [0,1].  A rule requested for polynomial degree d integrates every
// polynomial of total degree <= d exactly.
#pragma once

#include <uipdg/types.hpp>

#include <vector>

namespace uipdg {

struct QuadratureNode {
  double x, y, w;
};

/// Rule on the reference triangle {(x,y) : x >= 0, y >= 0, x + y <= 1}.
/// Weights sum to the reference area 1/2.
struct TriangleRule {
  int degree = 0; ///< minimal polynomial degree integrated exactly
  std::vector<QuadratureNode> nodes;
};

/// Rule on the reference edge [0,1]; weights sum to 1.
struct EdgeRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

/// Conical product rule exact for total degree >= d.  d up to 23 is
/// supported by the embedded tables.
TriangleRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact for degree >= d.
EdgeRule edge_rule(int degree);

} // namespace uipdg
