#include <uipdg/coeffs.hpp>

#include <cmath>

namespace uipdg {

DiffusionField DiffusionField::constant(const Mat2& kappa) {
  DiffusionField f;
  f.by_subdomain[1] = kappa;
  return f;
}

DiffusionField DiffusionField::constant_scalar(double kappa) {
  return constant(kappa * Mat2::Identity());
}

const Mat2& DiffusionField::tensor(int subdomain) const {
  auto it = by_subdomain.find(subdomain);
  if (it == by_subdomain.end()) {
    // single-tensor fields apply everywhere regardless of subdomain ids
    if (by_subdomain.size() == 1)
      return by_subdomain.begin()->second;
    throw ConfigError("no diffusion tensor for subdomain " +
                      std::to_string(subdomain));
  }
  return it->second;
}

void DiffusionField::validate_spd() const {
  if (by_subdomain.empty())
    throw ConfigError("diffusion field has no tensors");
  for (const auto& [sub, k] : by_subdomain) {
    const double scale = k.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !k.allFinite())
      throw ConfigError("diffusion tensor for subdomain " +
                        std::to_string(sub) + " is zero or not finite");
    if (std::abs(k(0, 1) - k(1, 0)) > 1e-12 * scale)
      throw ConfigError("diffusion tensor for subdomain " +
                        std::to_string(sub) + " is not symmetric");
    // 2x2 SPD: positive trace and determinant
    if (k(0, 0) <= 0.0 || k.determinant() <= 0.0)
      throw ConfigError("diffusion tensor for subdomain " +
                        std::to_string(sub) + " is not positive definite");
  }
}

double normal_diffusivity(const Mat2& kappa, const Vec2& n) {
  return n.dot(kappa * n);
}

double tau_one_sided(double alpha0, int degree, double kappa_n,
                     double face_length, double element_area,
                     double element_diameter, TauForm form) {
  const double c2 = trace_constant_sq(degree);
  if (form == TauForm::FaceArea)
    return alpha0 * c2 * kappa_n * face_length / element_area;
  return alpha0 * c2 * kappa_n / element_diameter;
}

namespace {

struct SideData {
  double tau = 0.0;     // one-sided stabilization
  double kappa_n = 0.0; // normal diffusivity
  double ratio = 0.0;   // |F|/|E|
};

SideData side_data(const Mesh& mesh, const DiffusionField& diffusion,
                   const Face& face, int element, int degree, double alpha0,
                   TauForm form) {
  SideData s;
  s.kappa_n = normal_diffusivity(
      diffusion.tensor(mesh.triangles[element].subdomain), face.normal);
  s.ratio = face.length / mesh.area(element);
  s.tau = tau_one_sided(alpha0, degree, s.kappa_n, face.length,
                        mesh.area(element), mesh.diameter(element), form);
  return s;
}

FaceCoefficientTable build(SchemeKind scheme, const Mesh& mesh,
                           const Skeleton& skeleton,
                           const DiffusionField& diffusion, int degree,
                           double alpha0, TauForm form) {
  diffusion.validate_spd();
  FaceCoefficientTable table;
  table.scheme = scheme;
  table.alpha0 = alpha0;
  table.tau_form = form;
  table.degree = degree;
  table.faces.resize(skeleton.faces.size());
  const double c2 = trace_constant_sq(degree);
  for (size_t f = 0; f < skeleton.faces.size(); ++f) {
    const Face& face = skeleton.faces[f];
    FaceCoefficients& c = table.faces[f];
    const SideData s1 =
        side_data(mesh, diffusion, face, face.left, degree, alpha0, form);
    c.tau1 = s1.tau;
    if (face.is_boundary()) {
      c.tau2 = 0.0;
      c.omega1 = 1.0;
      c.omega2 = 0.0;
      c.rho0 = c.tau1;
      c.rho1 = 0.0;
      // not consumed on boundary faces; stored with the interior formula
      // so the coefficient identities hold uniformly
      c.gamma_n = 0.5 * (c.omega1 - c.omega2);
      continue;
    }
    const SideData s2 =
        side_data(mesh, diffusion, face, face.right, degree, alpha0, form);
    c.tau2 = s2.tau;
    switch (scheme) {
    case SchemeKind::UIP: {
      const double sum = c.tau1 + c.tau2;
      c.omega1 = c.tau1 / sum;
      c.omega2 = c.tau2 / sum;
      c.rho0 = c.tau1 * c.tau2 / sum;
      c.rho1 = 1.0 / sum;
      break;
    }
    case SchemeKind::SWIP: {
      const double ksum = s1.kappa_n + s2.kappa_n;
      c.omega1 = s1.kappa_n / ksum;
      c.omega2 = s2.kappa_n / ksum;
      c.rho0 = alpha0 * c2 * (s1.kappa_n * s2.kappa_n / ksum) * 0.5 *
               (s1.ratio + s2.ratio);
      c.rho1 = 0.0;
      break;
    }
    case SchemeKind::IPF: {
      const double tau_f = 0.5 * (c.tau1 + c.tau2);
      c.omega1 = 0.5;
      c.omega2 = 0.5;
      c.rho0 = 0.5 * tau_f;
      c.rho1 = 1.0 / (2.0 * tau_f);
      break;
    }
    }
    c.gamma_n = 0.5 * (c.omega1 - c.omega2);
  }
  return table;
}

} // namespace

FaceCoefficientTable face_coefficients(const Mesh& mesh,
                                       const Skeleton& skeleton,
                                       const DiffusionField& diffusion,
                                       int degree, double alpha0,
                                       TauForm form) {
  return build(SchemeKind::UIP, mesh, skeleton, diffusion, degree, alpha0,
               form);
}

FaceCoefficientTable swip_face_coefficients(const Mesh& mesh,
                                            const Skeleton& skeleton,
                                            const DiffusionField& diffusion,
                                            int degree, double alpha0,
                                            TauForm form) {
  return build(SchemeKind::SWIP, mesh, skeleton, diffusion, degree, alpha0,
               form);
}

FaceCoefficientTable ipf_face_coefficients(const Mesh& mesh,
                                           const Skeleton& skeleton,
                                           const DiffusionField& diffusion,
                                           int degree, double alpha0,
                                           TauForm form) {
  return build(SchemeKind::IPF, mesh, skeleton, diffusion, degree, alpha0,
               form);
}

FaceCoefficientTable scheme_face_coefficients(SchemeKind scheme,
                                              const Mesh& mesh,
                                              const Skeleton& skeleton,
                                              const DiffusionField& diffusion,
                                              int degree, double alpha0,
                                              TauForm form) {
  return build(scheme, mesh, skeleton, diffusion, degree, alpha0, form);
}

} // namespace uipdg
