#include <uipdg/cases.hpp>
#include <uipdg/hybrid.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace uipdg;

namespace {

struct HybridSetup {
  TestCase tc;
  Mesh mesh;
  Skeleton skel;
  DGSpace space;
  FaceCoefficientTable table;
  SchemeSpec spec;

  HybridSetup(double lambda, int degree, int n, int epsilon)
      : tc(make_contrast_case(lambda)),
        mesh(generate_structured(n, tc.domain, tc.partition)),
        skel(build_skeleton(mesh)), space(mesh, skel, degree),
        table(face_coefficients(mesh, skel, tc.diffusion, degree, 8.0)) {
    spec.degree = degree;
    spec.epsilon = epsilon;
  }

  DGFunction solve_volume() const {
    const LinearSystem sys = assemble(space, tc.diffusion, table, spec,
                                      tc.source, tc.boundary);
    SolveOptions opts;
    opts.symmetric = spec.epsilon == 1;
    opts.tol = 1e-12;
    SolveReport report;
    return DGFunction{spec.degree, solve(sys.A, sys.b, opts, report)};
  }

  DGFunction solve_hybrid() const {
    const CondensedSystem cs = assemble_hip(space, tc.diffusion, table, spec,
                                            tc.source, tc.boundary);
    SolveOptions opts;
    opts.symmetric = spec.epsilon == 1;
    opts.tol = 1e-12;
    SolveReport report;
    const SkeletonFunction uhat = solve_condensed(space, cs, opts, report);
    return recover_element_solution(space, cs, uhat);
  }
};

} // namespace

TEST(Hybrid, CondensedSolutionMatchesVolumeSolution) {
  for (int eps : {1, 0, -1}) {
    HybridSetup s(100.0, 1, 4, eps);
    const DGFunction direct = s.solve_volume();
    const DGFunction recovered = s.solve_hybrid();
    const double scale = direct.coeffs.cwiseAbs().maxCoeff();
    EXPECT_LE((direct.coeffs - recovered.coeffs).cwiseAbs().maxCoeff() / scale,
              1e-9)
        << "epsilon " << eps;
  }
}

TEST(Hybrid, SkeletonUnknownsAreInteriorOnly) {
  HybridSetup s(1.0, 2, 4, 1);
  const CondensedSystem cs = assemble_hip(s.space, s.tc.diffusion, s.table,
                                          s.spec, s.tc.source, s.tc.boundary);
  const int kp1 = s.spec.degree + 1;
  EXPECT_EQ(cs.S.n, static_cast<int>(s.skel.interior.size()) * kp1);
  EXPECT_EQ(cs.S.block_size, kp1);
  for (int fi : s.skel.boundary)
    EXPECT_EQ(cs.face_to_unknown[fi], -1);
  for (int fi : s.skel.interior)
    EXPECT_GE(cs.face_to_unknown[fi], 0);
  // symmetric variant condenses to a symmetric skeleton system
  EXPECT_LE(max_asymmetry(cs.S) / cs.S.max_abs(), 1e-12);
}

TEST(Hybrid, RecoveredSolutionSatisfiesVolumeEquations) {
  HybridSetup s(1e4, 2, 4, 0);
  const DGFunction recovered = s.solve_hybrid();
  const LinearSystem sys = assemble(s.space, s.tc.diffusion, s.table, s.spec,
                                    s.tc.source, s.tc.boundary);
  Eigen::VectorXd r;
  spmv(sys.A, recovered.coeffs, r);
  EXPECT_LE((r - sys.b).norm() / sys.b.norm(), 1e-8);
}

TEST(Hybrid, RejectsNeumannBoundaries) {
  HybridSetup s(1.0, 1, 2, 1);
  Mesh mesh = generate_structured(2, s.tc.domain, s.tc.partition);
  mesh.boundary_overrides.push_back({2, 5, BoundaryKind::Neumann});
  const Skeleton skel = build_skeleton(mesh);
  const DGSpace space(mesh, skel, 1);
  const auto table = face_coefficients(mesh, skel, s.tc.diffusion, 1, 8.0);
  EXPECT_THROW(assemble_hip(space, s.tc.diffusion, table, s.spec, s.tc.source,
                            s.tc.boundary),
               ConfigError);
}

TEST(Traces, BoundaryFaceValueCarriesDirichletMoments) {
  HybridSetup s(1.0, 2, 2, 1);
  const DGFunction u = s.solve_volume();
  const TraceReconstruction tr =
      reconstruct_traces(s.space, s.tc.diffusion, s.table, u, s.tc.boundary);
  const SkeletonFunction g_moments =
      project_skeleton(s.space, s.tc.boundary.g_D);
  const int kp1 = s.spec.degree + 1;
  for (int fi : s.skel.boundary)
    for (int m = 0; m < kp1; ++m)
      EXPECT_NEAR(tr.uhat.coeffs[fi * kp1 + m],
                  g_moments.coeffs[fi * kp1 + m], 1e-13);
}

TEST(Traces, InteriorFaceValueIsWeightedMeanMinusScaledFluxJump) {
  HybridSetup s(100.0, 1, 4, 1);
  const DGFunction u = s.solve_volume();
  const TraceReconstruction tr =
      reconstruct_traces(s.space, s.tc.diffusion, s.table, u, s.tc.boundary);
  const auto& frule = s.space.face_rule();
  for (int fi : s.skel.interior) {
    const FaceCoefficients& c = s.table.faces[fi];
    const FaceTraceData traces = face_traces(s.space, u, fi, c);
    const Mat2& k1 =
        s.tc.diffusion.tensor(s.mesh.triangles[s.skel.faces[fi].left].subdomain);
    const Mat2& k2 = s.tc.diffusion.tensor(
        s.mesh.triangles[s.skel.faces[fi].right].subdomain);
    const Vec2 n = s.skel.faces[fi].normal;
    for (size_t q = 0; q < frule.points.size(); ++q) {
      const double flux_jump =
          (k1 * traces.left_grad[q]).dot(n) - (k2 * traces.right_grad[q]).dot(n);
      const double expected = traces.mean_w[q] - c.rho1 * flux_jump;
      EXPECT_NEAR(eval(s.space, tr.uhat, fi, frule.points[q]), expected,
                  1e-11 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(Traces, NumericalFluxIsSingleValued) {
  for (int eps : {1, 0, -1}) {
    HybridSetup s(1e4, 2, 4, eps);
    const DGFunction u = s.solve_volume();
    const TraceReconstruction tr =
        reconstruct_traces(s.space, s.tc.diffusion, s.table, u, s.tc.boundary);
    double scale = 1e-30;
    for (const auto& face_flux : tr.sigma_n)
      for (double v : face_flux)
        scale = std::max(scale, std::abs(v));
    for (int fi : s.skel.interior) {
      const auto left = one_sided_flux(s.space, s.tc.diffusion, s.table, u,
                                       tr.uhat, fi, 0);
      const auto right = one_sided_flux(s.space, s.tc.diffusion, s.table, u,
                                        tr.uhat, fi, 1);
      ASSERT_EQ(left.size(), right.size());
      for (size_t q = 0; q < left.size(); ++q)
        EXPECT_LE(std::abs(left[q] + right[q]) / scale, 1e-10)
            << "face " << fi << " point " << q << " epsilon " << eps;
    }
  }
}

TEST(Traces, SignConventionAgainstFaceNormal) {
  // On the face the stored numerical flux follows the face normal, so it
  // must coincide with the left side's one-sided flux.
  HybridSetup s(100.0, 1, 2, 1);
  const DGFunction u = s.solve_volume();
  const TraceReconstruction tr =
      reconstruct_traces(s.space, s.tc.diffusion, s.table, u, s.tc.boundary);
  for (int fi : s.skel.interior) {
    const auto left =
        one_sided_flux(s.space, s.tc.diffusion, s.table, u, tr.uhat, fi, 0);
    for (size_t q = 0; q < left.size(); ++q)
      EXPECT_NEAR(tr.sigma_n[fi][q], left[q],
                  1e-10 * std::max(1.0, std::abs(left[q])));
  }
}
