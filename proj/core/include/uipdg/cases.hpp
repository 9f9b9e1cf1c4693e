// The two benchmark problems: a smooth anisotropy-contrast problem on the
// unit square and a checkerboard-diffusivity problem with a singular
// interface solution on (-1,1)^2, with exact values, gradients, and sources.
#pragma once

#include <uipdg/errors.hpp>
#include <uipdg/forms.hpp>

#include <array>
#include <optional>

namespace uipdg {

/// Resolution of the coefficient-pair-to-quadrant assignment for the
/// checkerboard problem.  Sectors are numbered counterclockwise from the
/// first quadrant: 1 = NE, 2 = NW, 3 = SW, 4 = SE; sector j uses published
/// pair ((j - 1 + shift) mod 4) + 1.
struct KelloggAssignment {
  int shift = 0;
  /// max sampled interface mismatch per candidate shift, from the published
  /// four-digit coefficients
  std::array<double, 4> raw_defects{};
  /// coefficients per sector after projecting onto the one-dimensional
  /// solution family of the transmission conditions (a_j, b_j)
  std::array<double, 4> a{}, b{};
  double refined_defect = 0.0; ///< max sampled mismatch of the refined pairs
};

/// Scans the four cyclic assignments of published coefficient pairs
/// (pa, pb) to sectors, with sector diffusivities kappa_sector, selects the
/// unique continuous one, and refines its coefficients.  Throws ConfigError
/// with the full defect table when no assignment or more than one passes.
KelloggAssignment
kellogg_quadrant_assignment(const std::array<double, 4>& pa,
                            const std::array<double, 4>& pb, double alpha,
                            const std::array<double, 4>& kappa_sector);

struct TestCase {
  std::string name;
  BoundingBox domain;
  Partition partition = Partition::Quadrant;
  DiffusionField diffusion;
  double lambda = 1.0; ///< anisotropy ratio (contrast problem only)
  /// branch-aware exact solution for error measurement
  BranchValue exact_value;
  BranchGrad exact_gradient;
  /// point-based fields for assembly (quadrature points are interior, so
  /// the branch follows from the point)
  ScalarField source;
  BoundaryData boundary;
  std::optional<KelloggAssignment> kellogg;
};

/// Quadrant-wise anisotropic tensors diag(lambda, 1) / diag(1, 1/lambda)
/// with the smooth product-of-sines solution; homogeneous Dirichlet data.
TestCase make_contrast_case(double lambda);

/// Checkerboard 5/1 diffusivity with the singular r^alpha interface
/// solution; Dirichlet data from the exact solution; zero source.
TestCase make_checkerboard_case();

} // namespace uipdg
