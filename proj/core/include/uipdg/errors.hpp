// Broken-norm error measurement against (possibly piecewise-defined) exact
// solutions, and empirical convergence rates.
#pragma once

#include <uipdg/coeffs.hpp>
#include <uipdg/space.hpp>

namespace uipdg {

/// Exact value / gradient evaluated with the branch of the element's
/// subdomain, which disambiguates points on subdomain interfaces.
using BranchValue = std::function<double(const Vec2&, int)>;
using BranchGrad = std::function<Vec2(const Vec2&, int)>;

struct ErrorReport {
  double err_l2 = 0.0;
  double err_grad = 0.0;       ///< kappa^1/2-weighted broken H1 seminorm
  double jump_seminorm = 0.0;  ///< rho0-weighted jumps, all faces
  double err_energy = 0.0;     ///< sqrt(err_grad^2 + jump_seminorm^2)
  double trace_seminorm = 0.0; ///< h_E-weighted flux traces on element boundaries
  double err_augmented = 0.0;  ///< sqrt(err_energy^2 + trace_seminorm^2)
  int dofs = 0;
  double h = 0.0; ///< max element diameter
  /// filled between consecutive levels by the convergence harness
  double ecr_l2 = std::numeric_limits<double>::quiet_NaN();
  double ecr_energy = std::numeric_limits<double>::quiet_NaN();
};

/// Measures u - u_h in the norms above.  The jump weight rho0 comes from the
/// coefficient table of the scheme being measured.  `quad_degree` < 0 picks
/// 2k+4, slightly above the assembly rule.
ErrorReport compute_errors(const DGSpace& space,
                           const DiffusionField& diffusion,
                           const FaceCoefficientTable& coeffs,
                           const DGFunction& u_h, const BranchValue& exact,
                           const BranchGrad& exact_grad, int quad_degree = -1);

/// Energy norm of a discrete function (the error norms against zero data).
double energy_norm(const DGSpace& space, const DiffusionField& diffusion,
                   const FaceCoefficientTable& coeffs, const DGFunction& v);

/// Empirical convergence rate between two levels; NaN when undefined
/// (nonpositive errors or equal mesh sizes).
double ecr(double err_coarse, double err_fine, double h_coarse, double h_fine);

} // namespace uipdg
