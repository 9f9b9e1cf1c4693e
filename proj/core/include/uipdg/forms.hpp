// Face trace operators and assembly of the interior penalty bilinear forms
// with transmissibility-weighted averaging, including mixed boundary data
// imposed weakly.
#pragma once

#include <uipdg/coeffs.hpp>
#include <uipdg/linalg.hpp>
#include <uipdg/space.hpp>

namespace uipdg {

/// Scheme selector.  For UIP the symmetry parameter epsilon distinguishes
/// the symmetric (+1), incomplete (0), and nonsymmetric (-1) members of the
/// family; SWIP is symmetric only; IP_F supports all three.
struct SchemeSpec {
  SchemeKind scheme = SchemeKind::UIP;
  int epsilon = 1;
  double alpha0 = 8.0;
  int degree = 1;
};

/// Validates epsilon and per-scheme restrictions; throws ConfigError.
void validate(const SchemeSpec& spec);

const char* scheme_name(SchemeKind scheme);

/// Boundary data.  g_N prescribes the outward total flux sigma . n with
/// sigma = -kappa grad u on Neumann faces.
struct BoundaryData {
  ScalarField g_D;
  ScalarField g_N;

  static BoundaryData dirichlet(ScalarField g);
  static BoundaryData homogeneous();
};

struct LinearSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
};

/// Traces of u on one face at the face quadrature points.  Scalar fields
/// are expressed in the face frame: `jump` is the coefficient of the face
/// normal in the vector jump (v1 - v2 on interior faces, v1 on boundary
/// ones), fluxes are normal components along the face normal.
struct FaceTraceData {
  std::vector<double> left_value, right_value;
  std::vector<Vec2> left_grad, right_grad;
  std::vector<double> jump;
  std::vector<double> mean_w;      ///< omega1 v1 + omega2 v2
  std::vector<double> conj_mean_w; ///< omega2 v1 + omega1 v2
};

FaceTraceData face_traces(const DGSpace& space, const DGFunction& u, int face,
                          const FaceCoefficients& coeffs);

/// Vector-valued broken polynomial, component-wise.
struct VectorDGFunction {
  DGFunction x, y;
};

/// Both sides of the elementwise-vs-skeleton trace rearrangement: the sum
/// over elements of <b . n_E, phi - phi_hat> on their boundaries against its
/// skeleton form <conjugate-mean b, jump phi> + <jump b, mean phi - phi_hat>.
/// `omega1` holds the side-1 weight per face.  phi_hat must vanish on
/// boundary faces.
std::pair<double, double>
identity_relation_check(const DGSpace& space, const VectorDGFunction& b,
                        const DGFunction& phi, const SkeletonFunction& phi_hat,
                        const std::vector<double>& omega1);

/// The consistency form  -<conjugate-mean(kappa grad v) . n, jump w>  summed
/// over faces, evaluated directly.
double consistency_form(const DGSpace& space, const DiffusionField& diffusion,
                        const FaceCoefficientTable& coeffs,
                        const DGFunction& v, const DGFunction& w);

/// The same form through its arithmetic-mean + gamma flux-jump split.
double consistency_form_decomposed(const DGSpace& space,
                                   const DiffusionField& diffusion,
                                   const FaceCoefficientTable& coeffs,
                                   const DGFunction& v, const DGFunction& w);

/// Assembles the full discrete system for any of the three schemes.  The
/// coefficient table must have been built for the same scheme, degree, and
/// alpha0.  With epsilon = +1 the matrix is symmetric.
LinearSystem assemble(const DGSpace& space, const DiffusionField& diffusion,
                      const FaceCoefficientTable& coeffs,
                      const SchemeSpec& spec, const ScalarField& f,
                      const BoundaryData& bc);

} // namespace uipdg
