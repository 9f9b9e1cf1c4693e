// Microbenchmarks for the hot paths: basis evaluation, system assembly,
// sparse matrix-vector products, the iterative solver, static condensation,
// and error measurement.  All cases run the symmetric scheme on a uniform
// homogeneous mesh so timings track implementation cost, not conditioning.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "uipdg/basis.hpp"
#include "uipdg/coeffs.hpp"
#include "uipdg/errors.hpp"
#include "uipdg/forms.hpp"
#include "uipdg/hybrid.hpp"
#include "uipdg/linalg.hpp"
#include "uipdg/mesh.hpp"
#include "uipdg/space.hpp"

namespace {

using namespace uipdg;

constexpr double kPi = 3.14159265358979323846;

struct Setup {
  Mesh mesh;
  Skeleton skeleton;
  DGSpace space;
  DiffusionField diffusion;
  FaceCoefficientTable coeffs;
  SchemeSpec spec;
  ScalarField source;
  BoundaryData bc;

  Setup(int n, int degree)
      : mesh(generate_structured(n, {0, 0, 1, 1})),
        skeleton(build_skeleton(mesh)),
        space(mesh, skeleton, degree),
        diffusion(DiffusionField::constant_scalar(1.0)) {
    spec.epsilon = 1;
    spec.alpha0 = 8.0;
    spec.degree = degree;
    coeffs = face_coefficients(mesh, skeleton, diffusion, degree, spec.alpha0);
    source = [](const Vec2& p) {
      return 2.0 * kPi * kPi * std::sin(kPi * p.x()) * std::sin(kPi * p.y());
    };
    bc.g_D = [](const Vec2&) { return 0.0; };
    bc.g_N = [](const Vec2&) { return 0.0; };
  }
};

void BM_DubinerEval(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::vector<double> vals(space_dim(k));
  double x = 0.21, y = 0.33;
  for (auto _ : state) {
    dubiner_eval(k, x, y, vals.data());
    benchmark::DoNotOptimize(vals.data());
    // nudge the point so the loop cannot be hoisted
    x = 0.21 + 1e-12 * vals[0];
  }
  state.SetItemsProcessed(state.iterations() * space_dim(k));
}
BENCHMARK(BM_DubinerEval)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_DubinerGrad(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::vector<double> gx(space_dim(k)), gy(space_dim(k));
  double x = 0.21, y = 0.33;
  for (auto _ : state) {
    dubiner_grad(k, x, y, gx.data(), gy.data());
    benchmark::DoNotOptimize(gx.data());
    benchmark::DoNotOptimize(gy.data());
    x = 0.21 + 1e-12 * gx[0];
  }
  state.SetItemsProcessed(state.iterations() * space_dim(k));
}
BENCHMARK(BM_DubinerGrad)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_Assemble(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    LinearSystem sys =
        assemble(s.space, s.diffusion, s.coeffs, s.spec, s.source, s.bc);
    benchmark::DoNotOptimize(sys.b.data());
  }
  state.SetItemsProcessed(state.iterations() * s.mesh.num_triangles());
}
BENCHMARK(BM_Assemble)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Spmv(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2);
  const LinearSystem sys =
      assemble(s.space, s.diffusion, s.coeffs, s.spec, s.source, s.bc);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(sys.b.size(), -1.0, 1.0);
  Eigen::VectorXd y(sys.b.size());
  for (auto _ : state) {
    spmv(sys.A, x, y);
    benchmark::DoNotOptimize(y.data());
    x[0] += 1e-12;
  }
  state.SetItemsProcessed(state.iterations() * sys.b.size());
}
BENCHMARK(BM_Spmv)->Arg(8)->Arg(16)->Arg(32);

void BM_SolvePCG(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 1);
  const LinearSystem sys =
      assemble(s.space, s.diffusion, s.coeffs, s.spec, s.source, s.bc);
  SolveOptions opts;
  opts.tol = 1e-10;
  opts.symmetric = true;
  opts.force_iterative = true;
  for (auto _ : state) {
    SolveReport report;
    Eigen::VectorXd u = solve(sys.A, sys.b, opts, report);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_SolvePCG)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Condense(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    CondensedSystem cs =
        assemble_hip(s.space, s.diffusion, s.coeffs, s.spec, s.source, s.bc);
    benchmark::DoNotOptimize(cs.S.values.data());
  }
  state.SetItemsProcessed(state.iterations() * s.mesh.num_triangles());
}
BENCHMARK(BM_Condense)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ComputeErrors(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2);
  const DGFunction u_h = l2_project(s.space, [](const Vec2& p) {
    return std::sin(kPi * p.x()) * std::sin(kPi * p.y());
  });
  const BranchValue exact = [](const Vec2& p, int) {
    return std::sin(kPi * p.x()) * std::sin(kPi * p.y());
  };
  const BranchGrad exact_grad = [](const Vec2& p, int) {
    return Vec2(kPi * std::cos(kPi * p.x()) * std::sin(kPi * p.y()),
                kPi * std::sin(kPi * p.x()) * std::cos(kPi * p.y()));
  };
  for (auto _ : state) {
    ErrorReport report =
        compute_errors(s.space, s.diffusion, s.coeffs, u_h, exact, exact_grad);
    benchmark::DoNotOptimize(report.err_energy);
  }
  state.SetItemsProcessed(state.iterations() * s.mesh.num_triangles());
}
BENCHMARK(BM_ComputeErrors)
    ->Arg(8)
    ->Arg(16)
    ->Arg(32)
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
