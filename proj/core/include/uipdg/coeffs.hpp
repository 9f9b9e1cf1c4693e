// Diffusion tensors, one-sided stabilization, and the per-face coefficient
// systems (weights, penalties) for the UIP, SWIP, and IP_F schemes.
#pragma once

#include <uipdg/mesh.hpp>

#include <map>

namespace uipdg {

/// Piecewise-constant symmetric positive-definite tensor per subdomain id.
struct DiffusionField {
  std::map<int, Mat2> by_subdomain;

  static DiffusionField constant(const Mat2& kappa);
  static DiffusionField constant_scalar(double kappa);

  const Mat2& tensor(int subdomain) const;
  /// Symmetry within 1e-12 relative and positive definiteness of every
  /// tensor; throws ConfigError.
  void validate_spd() const;
};

/// Normal diffusivity n' kappa n.
double normal_diffusivity(const Mat2& kappa, const Vec2& n);

/// Trace constant C^2_{T,k} = (k+1)(k+2)/2 for P_k on a triangle.
constexpr double trace_constant_sq(int k) {
  return 0.5 * (k + 1.0) * (k + 2.0);
}

enum class TauForm {
  FaceArea, ///< alpha0 * C^2 * kappa_n * |F| / |E|   (default)
  Diameter  ///< alpha0 * C^2 * kappa_n / h_E         (cross-check variant)
};

enum class SchemeKind { UIP, SWIP, IPF };

/// One-sided stabilization tau_{E,F}.
double tau_one_sided(double alpha0, int degree, double kappa_n,
                     double face_length, double element_area,
                     double element_diameter, TauForm form);

/// Face coefficient system.  Side 1 is the face's left element, side 2 the
/// right one.  On boundary faces omega = (1, 0), rho0 = tau1, rho1 = 0 for
/// every scheme; gamma_n always stores (omega1 - omega2)/2 but is only
/// consumed on interior faces.
struct FaceCoefficients {
  double tau1 = 0.0, tau2 = 0.0;
  double omega1 = 1.0, omega2 = 0.0;
  double rho0 = 0.0;    ///< jump penalty
  double rho1 = 0.0;    ///< flux-jump penalty (interior UIP / IP_F only)
  double gamma_n = 0.0; ///< (omega1 - omega2)/2, the mean-correction factor
};

struct FaceCoefficientTable {
  SchemeKind scheme = SchemeKind::UIP;
  double alpha0 = 8.0;
  TauForm tau_form = TauForm::FaceArea;
  int degree = 1;
  std::vector<FaceCoefficients> faces;
};

/// UIP coefficients: omega_i = tau_i/(tau1+tau2), rho0 = tau1 tau2/(tau1+tau2),
/// rho1 = 1/(tau1+tau2).
FaceCoefficientTable face_coefficients(const Mesh& mesh,
                                       const Skeleton& skeleton,
                                       const DiffusionField& diffusion,
                                       int degree, double alpha0,
                                       TauForm form = TauForm::FaceArea);

/// SWIP coefficients: diffusivity weights omega_i = kappa_i/(kappa1+kappa2),
/// penalty rho0 = alpha0 C^2 (kappa1 kappa2/(kappa1+kappa2)) mean(|F|/|E|)
/// (the diffusivity analog of the UIP rho0, so homogeneous uniform meshes
/// give identical penalties), no flux-jump term.
FaceCoefficientTable swip_face_coefficients(const Mesh& mesh,
                                            const Skeleton& skeleton,
                                            const DiffusionField& diffusion,
                                            int degree, double alpha0,
                                            TauForm form = TauForm::FaceArea);

/// IP_F coefficients: tau_F = (tau1+tau2)/2, omega = (1/2, 1/2),
/// rho0 = tau_F/2, rho1 = 1/(2 tau_F).
FaceCoefficientTable ipf_face_coefficients(const Mesh& mesh,
                                           const Skeleton& skeleton,
                                           const DiffusionField& diffusion,
                                           int degree, double alpha0,
                                           TauForm form = TauForm::FaceArea);

/// Dispatch on scheme kind.
FaceCoefficientTable scheme_face_coefficients(SchemeKind scheme,
                                              const Mesh& mesh,
                                              const Skeleton& skeleton,
                                              const DiffusionField& diffusion,
                                              int degree, double alpha0,
                                              TauForm form = TauForm::FaceArea);

} // namespace uipdg
