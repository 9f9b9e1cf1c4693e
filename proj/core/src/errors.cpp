#include <uipdg/errors.hpp>

#include <cmath>

namespace uipdg {

namespace {

/// Basis tables at an error-evaluation rule, shared by all elements.
struct ErrorTables {
  TriangleRule vrule;
  EdgeRule frule;
  Eigen::MatrixXd V, Gx, Gy;                 // volume
  Eigen::MatrixXd fV[3][2], fGx[3][2], fGy[3][2]; // faces
};

Vec2 edge_ref(int le, double s) {
  switch (le) {
  case 0:
    return {s, 0.0};
  case 1:
    return {1.0 - s, s};
  default:
    return {0.0, 1.0 - s};
  }
}

ErrorTables make_tables(int k, int qdeg) {
  ErrorTables t;
  t.vrule = triangle_rule(qdeg);
  t.frule = edge_rule(qdeg);
  const int nk = space_dim(k);
  const int nq = static_cast<int>(t.vrule.nodes.size());
  t.V.resize(nk, nq);
  t.Gx.resize(nk, nq);
  t.Gy.resize(nk, nq);
  std::vector<double> vals(nk), gx(nk), gy(nk);
  for (int q = 0; q < nq; ++q) {
    dubiner_eval(k, t.vrule.nodes[q].x, t.vrule.nodes[q].y, vals.data());
    dubiner_grad(k, t.vrule.nodes[q].x, t.vrule.nodes[q].y, gx.data(),
                 gy.data());
    for (int i = 0; i < nk; ++i) {
      t.V(i, q) = vals[i];
      t.Gx(i, q) = gx[i];
      t.Gy(i, q) = gy[i];
    }
  }
  const int nfq = static_cast<int>(t.frule.points.size());
  for (int le = 0; le < 3; ++le)
    for (int dir = 0; dir < 2; ++dir) {
      t.fV[le][dir].resize(nk, nfq);
      t.fGx[le][dir].resize(nk, nfq);
      t.fGy[le][dir].resize(nk, nfq);
      for (int q = 0; q < nfq; ++q) {
        const double s = dir == 0 ? t.frule.points[q] : 1.0 - t.frule.points[q];
        const Vec2 r = edge_ref(le, s);
        dubiner_eval(k, r.x(), r.y(), vals.data());
        dubiner_grad(k, r.x(), r.y(), gx.data(), gy.data());
        for (int i = 0; i < nk; ++i) {
          t.fV[le][dir](i, q) = vals[i];
          t.fGx[le][dir](i, q) = gx[i];
          t.fGy[le][dir](i, q) = gy[i];
        }
      }
    }
  return t;
}

} // namespace

ErrorReport compute_errors(const DGSpace& space,
                           const DiffusionField& diffusion,
                           const FaceCoefficientTable& coeffs,
                           const DGFunction& u_h, const BranchValue& exact,
                           const BranchGrad& exact_grad, int quad_degree) {
  const int k = space.degree();
  const int nk = space.nk();
  const Mesh& mesh = space.mesh();
  const auto& skel = space.skeleton();
  const ErrorTables t =
      make_tables(k, quad_degree < 0 ? 2 * k + 4 : quad_degree);

  ErrorReport rep;
  rep.dofs = space.num_dofs();

  double l2 = 0.0, grad = 0.0, jump = 0.0, trace = 0.0;

  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& geom = space.geom(e);
    const int sub = mesh.triangles[e].subdomain;
    const Mat2& kappa = diffusion.tensor(sub);
    rep.h = std::max(rep.h, geom.h);
    for (size_t q = 0; q < t.vrule.nodes.size(); ++q) {
      const Vec2 ref(t.vrule.nodes[q].x, t.vrule.nodes[q].y);
      const Vec2 x = geom.p0 + geom.J * ref;
      double uh = 0.0;
      Vec2 gref = Vec2::Zero();
      for (int i = 0; i < nk; ++i) {
        const double c = u_h.coeffs[e * nk + i];
        uh += c * t.V(i, static_cast<int>(q));
        gref.x() += c * t.Gx(i, static_cast<int>(q));
        gref.y() += c * t.Gy(i, static_cast<int>(q));
      }
      const Vec2 gh = geom.Jinv.transpose() * gref;
      const double de = exact(x, sub) - uh;
      const Vec2 dg = exact_grad(x, sub) - gh;
      const double w = t.vrule.nodes[q].w * geom.detJ;
      l2 += w * de * de;
      grad += w * dg.dot(kappa * dg);
    }
  }

  const auto side_error = [&](const Face& f, bool left, int q, double& de,
                              Vec2& dg) {
    const int e = left ? f.left : f.right;
    const int le = left ? f.left_local : f.right_local;
    const int dir = left ? 0 : 1;
    const int sub = mesh.triangles[e].subdomain;
    const auto& geom = space.geom(e);
    double uh = 0.0;
    Vec2 gref = Vec2::Zero();
    for (int i = 0; i < nk; ++i) {
      const double c = u_h.coeffs[e * nk + i];
      uh += c * t.fV[le][dir](i, q);
      gref.x() += c * t.fGx[le][dir](i, q);
      gref.y() += c * t.fGy[le][dir](i, q);
    }
    const double s = t.frule.points[q];
    const Vec2 pa = mesh.vertices[f.a], pb = mesh.vertices[f.b];
    const Vec2 x = pa + s * (pb - pa);
    de = exact(x, sub) - uh;
    dg = exact_grad(x, sub) - geom.Jinv.transpose() * gref;
  };

  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    const Face& f = skel.faces[fi];
    const double rho0 = coeffs.faces[fi].rho0;
    const Mat2& kl = diffusion.tensor(mesh.triangles[f.left].subdomain);
    for (size_t q = 0; q < t.frule.points.size(); ++q) {
      const double w = t.frule.weights[q] * f.length;
      double de_l;
      Vec2 dg_l;
      side_error(f, true, static_cast<int>(q), de_l, dg_l);
      trace += space.geom(f.left).h * w * dg_l.dot(kl * dg_l);
      if (f.is_boundary()) {
        jump += rho0 * w * de_l * de_l;
        continue;
      }
      double de_r;
      Vec2 dg_r;
      side_error(f, false, static_cast<int>(q), de_r, dg_r);
      const Mat2& kr = diffusion.tensor(mesh.triangles[f.right].subdomain);
      trace += space.geom(f.right).h * w * dg_r.dot(kr * dg_r);
      const double dj = de_l - de_r;
      jump += rho0 * w * dj * dj;
    }
  }

  rep.err_l2 = std::sqrt(l2);
  rep.err_grad = std::sqrt(grad);
  rep.jump_seminorm = std::sqrt(jump);
  rep.err_energy = std::sqrt(grad + jump);
  rep.trace_seminorm = std::sqrt(trace);
  rep.err_augmented = std::sqrt(grad + jump + trace);
  return rep;
}

double energy_norm(const DGSpace& space, const DiffusionField& diffusion,
                   const FaceCoefficientTable& coeffs, const DGFunction& v) {
  const auto zero_val = [](const Vec2&, int) { return 0.0; };
  const auto zero_grad = [](const Vec2&, int) { return Vec2::Zero().eval(); };
  return compute_errors(space, diffusion, coeffs, v, zero_val, zero_grad)
      .err_energy;
}

double ecr(double err_coarse, double err_fine, double h_coarse, double h_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !(h_coarse > 0.0) ||
      !(h_fine > 0.0) || h_coarse == h_fine)
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

} // namespace uipdg
