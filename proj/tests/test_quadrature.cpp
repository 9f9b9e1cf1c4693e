#include <uipdg/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace uipdg;

namespace {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
// Evaluated as a running product to stay in range for large exponents.
double monomial_integral(int a, int b) {
  double value = 1.0;
  for (int i = 1; i <= b; ++i)
    value *= static_cast<double>(i) / (a + i);
  for (int i = a + b + 1; i <= a + b + 2; ++i)
    value /= i;
  return value;
}

double quad_monomial(const TriangleRule& rule, int a, int b) {
  double sum = 0.0;
  for (const auto& n : rule.nodes)
    sum += n.w * std::pow(n.x, a) * std::pow(n.y, b);
  return sum;
}

} // namespace

TEST(TriangleRule, MonomialOracleSpotValues) {
  EXPECT_DOUBLE_EQ(monomial_integral(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(monomial_integral(1, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(monomial_integral(1, 1), 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(monomial_integral(2, 0), 1.0 / 12.0);
}

TEST(TriangleRule, ExactForAllRequestedDegrees) {
  for (int degree = 0; degree <= 23; ++degree) {
    const TriangleRule rule = triangle_rule(degree);
    ASSERT_GE(rule.degree, degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const double exact = monomial_integral(a, b);
        const double got = quad_monomial(rule, a, b);
        EXPECT_NEAR(got, exact, 1e-13 * std::max(1.0, std::abs(exact)))
            << "degree " << degree << " monomial x^" << a << " y^" << b;
      }
    }
  }
}

TEST(TriangleRule, WeightsSumToAreaAndNodesInterior) {
  for (int degree : {1, 4, 9, 16, 23}) {
    const TriangleRule rule = triangle_rule(degree);
    double wsum = 0.0;
    for (const auto& n : rule.nodes) {
      EXPECT_GT(n.x, 0.0);
      EXPECT_GT(n.y, 0.0);
      EXPECT_LT(n.x + n.y, 1.0);
      EXPECT_GT(n.w, 0.0);
      wsum += n.w;
    }
    EXPECT_NEAR(wsum, 0.5, 1e-14);
  }
}

TEST(TriangleRule, RejectsOutOfRangeDegrees) {
  EXPECT_THROW(triangle_rule(-1), ConfigError);
  EXPECT_THROW(triangle_rule(24), ConfigError);
}

TEST(EdgeRule, ExactAndNormalized) {
  for (int degree = 0; degree <= 23; ++degree) {
    const EdgeRule rule = edge_rule(degree);
    ASSERT_GE(rule.degree, degree);
    ASSERT_EQ(rule.points.size(), rule.weights.size());
    double wsum = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      EXPECT_GT(rule.points[q], 0.0);
      EXPECT_LT(rule.points[q], 1.0);
      wsum += rule.weights[q];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (int a = 0; a <= degree; ++a) {
      double sum = 0.0;
      for (size_t q = 0; q < rule.points.size(); ++q)
        sum += rule.weights[q] * std::pow(rule.points[q], a);
      EXPECT_NEAR(sum, 1.0 / (a + 1), 1e-14) << "edge monomial t^" << a;
    }
  }
}

TEST(EdgeRule, TwoPointNodes) {
  // Gauss-Legendre with two nodes on [0,1]: (1 -/+ 1/sqrt(3)) / 2.
  const EdgeRule rule = edge_rule(3);
  ASSERT_EQ(rule.points.size(), 2u);
  const double lo = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
  const double hi = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
  EXPECT_NEAR(rule.points[0], lo, 1e-15);
  EXPECT_NEAR(rule.points[1], hi, 1e-15);
  EXPECT_NEAR(rule.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(rule.weights[1], 0.5, 1e-15);
}
