#include <uipdg/coeffs.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace uipdg;

namespace {

// Unit square split along the main diagonal; the two triangles carry
// subdomains 1 and 2 so each side of the interior face can get its own
// tensor.
Mesh split_square() {
  Mesh mesh;
  mesh.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  mesh.triangles = {{{0, 1, 2}, 1}, {{0, 2, 3}, 2}};
  return mesh;
}

int interior_face_index(const Skeleton& skel) {
  return skel.interior.at(0);
}

} // namespace

TEST(TraceConstant, TriangleValues) {
  EXPECT_DOUBLE_EQ(trace_constant_sq(1), 3.0);
  EXPECT_DOUBLE_EQ(trace_constant_sq(2), 6.0);
  EXPECT_DOUBLE_EQ(trace_constant_sq(3), 10.0);
}

TEST(NormalDiffusivity, AnisotropicTensor) {
  Mat2 kappa;
  kappa << 7.0, 0.0, 0.0, 2.0;
  EXPECT_DOUBLE_EQ(normal_diffusivity(kappa, Vec2(1, 0)), 7.0);
  EXPECT_DOUBLE_EQ(normal_diffusivity(kappa, Vec2(0, 1)), 2.0);
  const Vec2 diag = Vec2(1, 1).normalized();
  EXPECT_NEAR(normal_diffusivity(kappa, diag), 4.5, 1e-14);
}

TEST(TauOneSided, UnitRightTriangleHypotenuse) {
  // legs 1, area 1/2, hypotenuse length sqrt(2), k = 1, isotropic kappa,
  // alpha0 = 8: face-area form gives 8 * 3 * sqrt(2) / (1/2) = 48 sqrt(2).
  const double face = std::sqrt(2.0);
  const double tau =
      tau_one_sided(8.0, 1, 1.0, face, 0.5, face, TauForm::FaceArea);
  EXPECT_NEAR(tau, 48.0 * std::sqrt(2.0), 1e-12);
  // diameter form: 8 * 3 / sqrt(2)
  const double tau_d =
      tau_one_sided(8.0, 1, 1.0, face, 0.5, face, TauForm::Diameter);
  EXPECT_NEAR(tau_d, 24.0 / std::sqrt(2.0), 1e-12);
}

TEST(FaceCoefficients, InteriorPairExample) {
  // Choose scalar diffusivities so the one-sided parameters come out as
  // (tau1, tau2) = (2, 6); the geometry factor on the diagonal face with
  // k = 1, alpha0 = 8 is 48 sqrt(2).
  const Mesh mesh = split_square();
  const Skeleton skel = build_skeleton(mesh);
  const double geom = 48.0 * std::sqrt(2.0);
  DiffusionField diff;
  diff.by_subdomain[1] = (2.0 / geom) * Mat2::Identity();
  diff.by_subdomain[2] = (6.0 / geom) * Mat2::Identity();
  const FaceCoefficientTable table =
      face_coefficients(mesh, skel, diff, 1, 8.0);
  const FaceCoefficients& c = table.faces[interior_face_index(skel)];
  EXPECT_NEAR(c.tau1, 2.0, 1e-12);
  EXPECT_NEAR(c.tau2, 6.0, 1e-12);
  EXPECT_NEAR(c.omega1, 0.25, 1e-13);
  EXPECT_NEAR(c.omega2, 0.75, 1e-13);
  EXPECT_NEAR(c.rho0, 1.5, 1e-13);
  EXPECT_NEAR(c.rho1, 0.125, 1e-13);
  EXPECT_NEAR(c.gamma_n, -0.25, 1e-13);
}

TEST(FaceCoefficients, BoundaryConvention) {
  const Mesh mesh = split_square();
  const Skeleton skel = build_skeleton(mesh);
  const DiffusionField diff = DiffusionField::constant_scalar(3.0);
  const auto uip = face_coefficients(mesh, skel, diff, 1, 8.0);
  const auto swip = swip_face_coefficients(mesh, skel, diff, 1, 8.0);
  const auto ipf = ipf_face_coefficients(mesh, skel, diff, 1, 8.0);
  for (const FaceCoefficientTable* table : {&uip, &swip, &ipf}) {
    for (int fi : skel.boundary) {
      const FaceCoefficients& c = table->faces[fi];
      EXPECT_DOUBLE_EQ(c.omega1, 1.0);
      EXPECT_DOUBLE_EQ(c.omega2, 0.0);
      EXPECT_DOUBLE_EQ(c.rho0, c.tau1);
      EXPECT_DOUBLE_EQ(c.rho1, 0.0);
      EXPECT_DOUBLE_EQ(c.gamma_n, 0.5);
      EXPECT_GT(c.tau1, 0.0);
    }
  }
}

TEST(FaceCoefficients, IdentitiesHoldUnderExtremeContrast) {
  const Mesh mesh = generate_structured(4, {0, 0, 1, 1}, Partition::Quadrant);
  const Skeleton skel = build_skeleton(mesh);
  for (double lambda : {1.0, 1e4, 1e8}) {
    DiffusionField diff;
    diff.by_subdomain[1] = diff.by_subdomain[3] =
        (Mat2() << lambda, 0, 0, 1).finished();
    diff.by_subdomain[2] = diff.by_subdomain[4] =
        (Mat2() << 1, 0, 0, 1.0 / lambda).finished();
    const FaceCoefficientTable table =
        face_coefficients(mesh, skel, diff, 2, 8.0);
    for (int fi : skel.interior) {
      const FaceCoefficients& c = table.faces[fi];
      EXPECT_NEAR(c.omega1 + c.omega2, 1.0, 1e-13);
      EXPECT_NEAR(c.omega2 * c.omega2 * c.tau1 + c.omega1 * c.omega1 * c.tau2,
                  c.rho0, 1e-13 * c.rho0);
      EXPECT_NEAR(c.rho0 * c.rho1, c.omega1 * c.omega2, 1e-13);
      EXPECT_LE(c.rho0 * c.rho1, 0.25 + 1e-13);
      EXPECT_LE(c.rho0, std::min(c.tau1, c.tau2) * (1 + 1e-13));
      EXPECT_LE(c.rho1, (1 + 1e-13) / std::max(c.tau1, c.tau2));
      EXPECT_NEAR(c.gamma_n, 0.5 * (c.omega1 - c.omega2), 1e-13);
    }
  }
}

TEST(FaceCoefficients, HomogeneousUniformMeshUnifiesAllSchemes) {
  // With one isotropic tensor everywhere the three schemes prescribe the
  // same weights and penalties, except that the diffusivity-weighted scheme
  // drops the flux-jump term.
  const Mesh mesh = generate_structured(4, {0, 0, 1, 1});
  const Skeleton skel = build_skeleton(mesh);
  const DiffusionField diff = DiffusionField::constant_scalar(2.5);
  const auto uip = face_coefficients(mesh, skel, diff, 1, 8.0);
  const auto swip = swip_face_coefficients(mesh, skel, diff, 1, 8.0);
  const auto ipf = ipf_face_coefficients(mesh, skel, diff, 1, 8.0);
  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    EXPECT_NEAR(uip.faces[fi].rho0, swip.faces[fi].rho0,
                1e-13 * uip.faces[fi].rho0);
    EXPECT_NEAR(uip.faces[fi].rho0, ipf.faces[fi].rho0,
                1e-13 * uip.faces[fi].rho0);
    EXPECT_NEAR(uip.faces[fi].rho1, ipf.faces[fi].rho1, 1e-13);
    EXPECT_EQ(swip.faces[fi].rho1, 0.0);
    if (!skel.faces[fi].is_boundary()) {
      EXPECT_NEAR(uip.faces[fi].omega1, 0.5, 1e-13);
      EXPECT_NEAR(swip.faces[fi].omega1, 0.5, 1e-13);
      EXPECT_NEAR(ipf.faces[fi].omega1, 0.5, 1e-13);
    }
  }
}

TEST(FaceCoefficients, DiffusivityWeightsOnContrastInterface) {
  // 5-vs-1 checkerboard: across the material interface the diffusivity
  // weighting puts 5/6 on the high side, while the stabilization weighting
  // puts the high weight on the side with the LARGER tau (also the high
  // side here since the geometry matches).
  const Mesh mesh = generate_structured(4, {-1, -1, 1, 1}, Partition::Quadrant);
  const Skeleton skel = build_skeleton(mesh);
  DiffusionField diff;
  diff.by_subdomain[1] = diff.by_subdomain[3] = 5.0 * Mat2::Identity();
  diff.by_subdomain[2] = diff.by_subdomain[4] = Mat2::Identity();
  const auto swip = swip_face_coefficients(mesh, skel, diff, 1, 8.0);
  int checked = 0;
  for (int fi : skel.interior) {
    const Face& f = skel.faces[fi];
    const int s1 = mesh.triangles[f.left].subdomain;
    const int s2 = mesh.triangles[f.right].subdomain;
    if (s1 == s2)
      continue;
    const double k1 = s1 == 1 || s1 == 3 ? 5.0 : 1.0;
    const double k2 = s2 == 1 || s2 == 3 ? 5.0 : 1.0;
    if (k1 == k2)
      continue;
    const FaceCoefficients& c = swip.faces[fi];
    EXPECT_NEAR(k1 > k2 ? c.omega1 : c.omega2, 5.0 / 6.0, 1e-13);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(FaceCoefficients, MeanWeightedHalvesReduceToStandardPenalty) {
  // scheme-kind dispatch covers all three branches
  const Mesh mesh = generate_structured(2, {0, 0, 1, 1});
  const Skeleton skel = build_skeleton(mesh);
  const DiffusionField diff = DiffusionField::constant_scalar(1.0);
  for (SchemeKind kind : {SchemeKind::UIP, SchemeKind::SWIP, SchemeKind::IPF}) {
    const auto table =
        scheme_face_coefficients(kind, mesh, skel, diff, 1, 8.0);
    EXPECT_EQ(table.scheme, kind);
    EXPECT_EQ(table.faces.size(), skel.faces.size());
  }
}

TEST(DiffusionField, ValidationRejectsBadTensors) {
  {
    DiffusionField diff;
    diff.by_subdomain[1] = (Mat2() << 1, 2, 2, 1).finished(); // indefinite
    EXPECT_THROW(diff.validate_spd(), ConfigError);
  }
  {
    DiffusionField diff;
    diff.by_subdomain[1] = (Mat2() << 1, 0.5, 0.1, 1).finished(); // asymmetric
    EXPECT_THROW(diff.validate_spd(), ConfigError);
  }
  {
    DiffusionField diff;
    EXPECT_THROW(diff.validate_spd(), ConfigError); // empty
  }
  {
    // A single-tensor field covers every subdomain id; a multi-tensor field
    // must map each id it is asked for.
    const DiffusionField single = DiffusionField::constant_scalar(2.0);
    EXPECT_NO_THROW(single.validate_spd());
    EXPECT_NEAR(single.tensor(7)(0, 0), 2.0, 1e-15);
    DiffusionField multi;
    multi.by_subdomain[1] = Mat2::Identity();
    multi.by_subdomain[2] = 3.0 * Mat2::Identity();
    EXPECT_NO_THROW(multi.validate_spd());
    EXPECT_THROW(multi.tensor(7), ConfigError);
  }
}
