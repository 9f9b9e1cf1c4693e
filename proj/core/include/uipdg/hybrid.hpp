// Hybridized interior penalty formulation: element-local forms coupled
// through single-valued face unknowns, static condensation onto the
// interior skeleton, local recovery, and reconstruction of the numerical
// traces from a volume solution.  Serves both as a solver and as the
// equivalence oracle for the condensed volume scheme.
#pragma once

#include <uipdg/forms.hpp>

namespace uipdg {

/// Skeleton system after eliminating the element unknowns, with the
/// per-element data needed for back-substitution.  Unknowns are the k+1
/// face modes of every interior face, in interior-face order; Dirichlet
/// boundary modes are imposed and carried in `uhat_bc`.
struct CondensedSystem {
  SparseMatrix S;
  Eigen::VectorXd rhs;
  int degree = 1;
  int epsilon = 1;
  /// unknown block index per face, -1 for boundary faces
  std::vector<int> face_to_unknown;
  /// imposed Dirichlet moments (interior blocks zero)
  SkeletonFunction uhat_bc;
  std::vector<Eigen::FullPivLU<Eigen::MatrixXd>> local_lu;
  std::vector<Eigen::MatrixXd> local_coupling; ///< element rows x 3(k+1)
  std::vector<Eigen::VectorXd> local_rhs;
};

/// Assembles the hybridized system and condenses the element unknowns.
/// tau is taken one-sided from the coefficient table.  Boundary faces must
/// all be Dirichlet.  Throws SolverError naming the element if a local
/// block is singular.
CondensedSystem assemble_hip(const DGSpace& space,
                             const DiffusionField& diffusion,
                             const FaceCoefficientTable& coeffs,
                             const SchemeSpec& spec, const ScalarField& f,
                             const BoundaryData& bc);

/// Solves the condensed system; returns the full skeleton function with
/// imposed boundary moments filled in.
SkeletonFunction solve_condensed(const DGSpace& space,
                                 const CondensedSystem& cs,
                                 const SolveOptions& opts,
                                 SolveReport& report);

/// Element-by-element back-substitution given the skeleton solution.
DGFunction recover_element_solution(const DGSpace& space,
                                    const CondensedSystem& cs,
                                    const SkeletonFunction& uhat);

/// Numerical traces reconstructed from a volume solution: the face value
/// uhat (weighted mean minus the scaled flux jump on interior faces,
/// Dirichlet moments on the boundary) and the normal component of the
/// numerical flux along each face normal at the face quadrature points.
struct TraceReconstruction {
  SkeletonFunction uhat;
  std::vector<std::vector<double>> sigma_n;
};

TraceReconstruction reconstruct_traces(const DGSpace& space,
                                       const DiffusionField& diffusion,
                                       const FaceCoefficientTable& coeffs,
                                       const DGFunction& u,
                                       const BoundaryData& bc);

/// One-sided numerical flux along the outward normal of the given side
/// (0 = left, 1 = right) at the face quadrature points:
/// -kappa grad u . n_E + tau (u - uhat).  The two sides of an interior face
/// must sum to zero; used as the single-valuedness oracle.
std::vector<double> one_sided_flux(const DGSpace& space,
                                   const DiffusionField& diffusion,
                                   const FaceCoefficientTable& coeffs,
                                   const DGFunction& u,
                                   const SkeletonFunction& uhat, int face,
                                   int side);

} // namespace uipdg
