#include <uipdg/hybrid.hpp>

namespace uipdg {

namespace {

/// Face-mode basis values at the face quadrature points, (k+1) x Q.
Eigen::MatrixXd edge_mode_table(const DGSpace& space) {
  const int m = space.degree() + 1;
  const auto& rule = space.face_rule();
  Eigen::MatrixXd psi(m, rule.points.size());
  std::vector<double> vals(m);
  for (size_t q = 0; q < rule.points.size(); ++q) {
    edge_basis_eval(space.degree(), rule.points[q], vals.data());
    for (int i = 0; i < m; ++i)
      psi(i, static_cast<int>(q)) = vals[i];
  }
  return psi;
}

struct SideTables {
  Eigen::MatrixXd V, C; // values and normal fluxes along the face normal
};

SideTables side_tables(const DGSpace& space, const DiffusionField& diffusion,
                       const Face& face, bool left_side) {
  const int e = left_side ? face.left : face.right;
  const int le = left_side ? face.left_local : face.right_local;
  const int dir = left_side ? 0 : 1;
  const Mat2& kappa = diffusion.tensor(space.mesh().triangles[e].subdomain);
  const Vec2 w = space.geom(e).Jinv * (kappa * face.normal);
  SideTables t;
  t.V = space.face_values(le, dir);
  t.C = space.face_gx(le, dir) * w.x() + space.face_gy(le, dir) * w.y();
  return t;
}

} // namespace

CondensedSystem assemble_hip(const DGSpace& space,
                             const DiffusionField& diffusion,
                             const FaceCoefficientTable& coeffs,
                             const SchemeSpec& spec, const ScalarField& f,
                             const BoundaryData& bc) {
  validate(spec);
  if (coeffs.degree != spec.degree || space.degree() != spec.degree)
    throw ConfigError("degree mismatch between space, coefficients, and "
                      "scheme spec");
  if (!bc.g_D)
    throw ConfigError("boundary data lacks a Dirichlet value function");
  const auto& skel = space.skeleton();
  for (int bf : skel.boundary)
    if (skel.faces[bf].marker == BoundaryKind::Neumann)
      throw ConfigError("the hybridized path supports Dirichlet boundaries "
                        "only");

  const Mesh& mesh = space.mesh();
  const int nk = space.nk();
  const int m = spec.degree + 1;
  const int ne = mesh.num_triangles();
  const double eps = spec.epsilon;
  const Eigen::MatrixXd psi = edge_mode_table(space);

  CondensedSystem cs;
  cs.degree = spec.degree;
  cs.epsilon = spec.epsilon;
  cs.face_to_unknown.assign(skel.faces.size(), -1);
  for (size_t i = 0; i < skel.interior.size(); ++i)
    cs.face_to_unknown[skel.interior[i]] = static_cast<int>(i);
  cs.uhat_bc = zero_skeleton_function(space);
  {
    const SkeletonFunction g = project_skeleton(space, bc.g_D);
    for (int bf : skel.boundary)
      cs.uhat_bc.coeffs.segment(bf * m, m) = g.coeffs.segment(bf * m, m);
  }
  cs.local_lu.reserve(ne);
  cs.local_coupling.reserve(ne);
  cs.local_rhs.reserve(ne);

  const int nunknown = static_cast<int>(skel.interior.size());
  BlockSparseBuilder builder(nunknown, m);
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < 3; ++a) {
      const int fa = cs.face_to_unknown[skel.element_faces[e][a]];
      if (fa < 0)
        continue;
      for (int b = 0; b < 3; ++b) {
        const int fb = cs.face_to_unknown[skel.element_faces[e][b]];
        if (fb >= 0)
          builder.add_coupling(fa, fb);
      }
    }
  }
  builder.finalize_pattern();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nunknown * m);

  const auto& vrule = space.volume_rule();
  const auto& frule = space.face_rule();
  const int nvq = static_cast<int>(vrule.nodes.size());
  const int nfq = static_cast<int>(frule.points.size());

  Eigen::MatrixXd Auu(nk, nk), Aul(nk, 3 * m), Alu(3 * m, nk), All(3 * m, 3 * m);
  Eigen::VectorXd Fe(nk), W(nfq);
  Eigen::MatrixXd P(2, nk);
  for (int e = 0; e < ne; ++e) {
    const auto& geom = space.geom(e);
    const Mat2& kappa = diffusion.tensor(mesh.triangles[e].subdomain);
    Auu.setZero();
    Aul.setZero();
    Alu.setZero();
    All.setZero();
    Fe.setZero();
    for (int q = 0; q < nvq; ++q) {
      P = geom.Jinv.transpose() *
          (Eigen::MatrixXd(2, nk) << space.vol_gx().col(q).transpose(),
           space.vol_gy().col(q).transpose())
              .finished();
      Auu.noalias() +=
          (vrule.nodes[q].w * geom.detJ) * P.transpose() * (kappa * P);
      const double fw =
          f(space.volume_point(e, q)) * vrule.nodes[q].w * geom.detJ;
      for (int i = 0; i < nk; ++i)
        Fe[i] += fw * space.vol_values()(i, q);
    }
    for (int a = 0; a < 3; ++a) {
      const int fi = skel.element_faces[e][a];
      const Face& face = skel.faces[fi];
      const FaceCoefficients& c = coeffs.faces[fi];
      const bool left = face.left == e;
      const double sign = left ? 1.0 : -1.0;
      const double tau = left ? c.tau1 : c.tau2;
      const SideTables t = side_tables(space, diffusion, face, left);
      for (int q = 0; q < nfq; ++q)
        W[q] = frule.weights[q] * face.length;
      // fluxes along the element's outward normal
      const Eigen::MatrixXd Ce = sign * t.C;
      Auu.noalias() += -t.V * W.asDiagonal() * Ce.transpose() -
                       eps * Ce * W.asDiagonal() * t.V.transpose() +
                       tau * t.V * W.asDiagonal() * t.V.transpose();
      const auto cols = Eigen::seqN(a * m, m);
      Aul(Eigen::all, cols).noalias() +=
          -tau * t.V * W.asDiagonal() * psi.transpose() +
          eps * Ce * W.asDiagonal() * psi.transpose();
      Alu(cols, Eigen::all).noalias() +=
          psi * W.asDiagonal() * Ce.transpose() -
          tau * psi * W.asDiagonal() * t.V.transpose();
      All(cols, cols).noalias() += tau * psi * W.asDiagonal() * psi.transpose();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(Auu);
    if (!lu.isInvertible())
      throw SolverError(
          "singular local block in element " + std::to_string(e) +
          " during condensation (stabilization below the usable range?)");
    const Eigen::MatrixXd X = lu.solve(Aul);          // Auu^-1 Aul
    const Eigen::VectorXd y = lu.solve(Fe);           // Auu^-1 F
    const Eigen::MatrixXd Se = All - Alu * X;         // local skeleton block
    const Eigen::VectorXd ge = -Alu * y;

    // scatter unknown rows; move known Dirichlet columns to the rhs
    for (int a = 0; a < 3; ++a) {
      const int fa = skel.element_faces[e][a];
      const int ua = cs.face_to_unknown[fa];
      if (ua < 0)
        continue;
      rhs.segment(ua * m, m) += ge.segment(a * m, m);
      for (int b = 0; b < 3; ++b) {
        const int fb = skel.element_faces[e][b];
        const int ub = cs.face_to_unknown[fb];
        if (ub >= 0) {
          builder.add_block(ua, ub, Se.block(a * m, b * m, m, m));
        } else {
          rhs.segment(ua * m, m) -=
              Se.block(a * m, b * m, m, m) * cs.uhat_bc.coeffs.segment(fb * m, m);
        }
      }
    }

    cs.local_lu.push_back(std::move(lu));
    cs.local_coupling.push_back(Aul);
    cs.local_rhs.push_back(Fe);
  }

  cs.S = builder.take();
  cs.rhs = std::move(rhs);
  return cs;
}

SkeletonFunction solve_condensed(const DGSpace& space,
                                 const CondensedSystem& cs,
                                 const SolveOptions& opts,
                                 SolveReport& report) {
  SolveOptions o = opts;
  o.symmetric = cs.epsilon == 1;
  const Eigen::VectorXd lambda = solve(cs.S, cs.rhs, o, report);
  SkeletonFunction uhat = cs.uhat_bc;
  const int m = cs.degree + 1;
  for (size_t f = 0; f < space.skeleton().faces.size(); ++f) {
    const int u = cs.face_to_unknown[f];
    if (u >= 0)
      uhat.coeffs.segment(f * m, m) = lambda.segment(u * m, m);
  }
  return uhat;
}

DGFunction recover_element_solution(const DGSpace& space,
                                    const CondensedSystem& cs,
                                    const SkeletonFunction& uhat) {
  const auto& skel = space.skeleton();
  const int nk = space.nk();
  const int m = cs.degree + 1;
  DGFunction u = zero_function(space);
  Eigen::VectorXd lam(3 * m);
  for (int e = 0; e < space.mesh().num_triangles(); ++e) {
    for (int a = 0; a < 3; ++a)
      lam.segment(a * m, m) =
          uhat.coeffs.segment(skel.element_faces[e][a] * m, m);
    u.coeffs.segment(e * nk, nk) =
        cs.local_lu[e].solve(cs.local_rhs[e] - cs.local_coupling[e] * lam);
  }
  return u;
}

TraceReconstruction reconstruct_traces(const DGSpace& space,
                                       const DiffusionField& diffusion,
                                       const FaceCoefficientTable& coeffs,
                                       const DGFunction& u,
                                       const BoundaryData& bc) {
  if (!bc.g_D)
    throw ConfigError("boundary data lacks a Dirichlet value function");
  const auto& skel = space.skeleton();
  const auto& rule = space.face_rule();
  const int nq = static_cast<int>(rule.points.size());
  const int nk = space.nk();
  const int m = space.degree() + 1;
  const Eigen::MatrixXd psi = edge_mode_table(space);

  TraceReconstruction rec;
  rec.uhat = zero_skeleton_function(space);
  rec.sigma_n.resize(skel.faces.size());
  {
    const SkeletonFunction g = project_skeleton(space, bc.g_D);
    for (int bf : skel.boundary)
      rec.uhat.coeffs.segment(bf * m, m) = g.coeffs.segment(bf * m, m);
  }

  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    const Face& face = skel.faces[fi];
    const FaceCoefficients& c = coeffs.faces[fi];
    auto& sig = rec.sigma_n[fi];
    sig.resize(nq);
    const SideTables tl = side_tables(space, diffusion, face, true);
    if (face.is_boundary()) {
      for (int q = 0; q < nq; ++q) {
        double v1 = 0.0, b1 = 0.0;
        for (int i = 0; i < nk; ++i) {
          v1 += u.coeffs[face.left * nk + i] * tl.V(i, q);
          b1 += u.coeffs[face.left * nk + i] * tl.C(i, q);
        }
        double uhat_q = 0.0;
        for (int i = 0; i < m; ++i)
          uhat_q += rec.uhat.coeffs[fi * m + i] * psi(i, q);
        sig[q] = -b1 + c.rho0 * (v1 - uhat_q);
      }
      continue;
    }
    const SideTables tr = side_tables(space, diffusion, face, false);
    for (int q = 0; q < nq; ++q) {
      double v1 = 0.0, v2 = 0.0, b1 = 0.0, b2 = 0.0;
      for (int i = 0; i < nk; ++i) {
        v1 += u.coeffs[face.left * nk + i] * tl.V(i, q);
        b1 += u.coeffs[face.left * nk + i] * tl.C(i, q);
        v2 += u.coeffs[face.right * nk + i] * tr.V(i, q);
        b2 += u.coeffs[face.right * nk + i] * tr.C(i, q);
      }
      const double uhat_q =
          (c.omega1 * v1 + c.omega2 * v2) - c.rho1 * (b1 - b2);
      sig[q] = -(c.omega2 * b1 + c.omega1 * b2) + c.rho0 * (v1 - v2);
      for (int i = 0; i < m; ++i)
        rec.uhat.coeffs[fi * m + i] += rule.weights[q] * uhat_q * psi(i, q);
    }
  }
  return rec;
}

std::vector<double> one_sided_flux(const DGSpace& space,
                                   const DiffusionField& diffusion,
                                   const FaceCoefficientTable& coeffs,
                                   const DGFunction& u,
                                   const SkeletonFunction& uhat, int face,
                                   int side) {
  const Face& f = space.skeleton().faces[face];
  if (side == 1 && f.is_boundary())
    throw Error("boundary face has no right side");
  const FaceCoefficients& c = coeffs.faces[face];
  const bool left = side == 0;
  const double sign = left ? 1.0 : -1.0;
  const double tau = left ? c.tau1 : c.tau2;
  const int e = left ? f.left : f.right;
  const SideTables t = side_tables(space, diffusion, f, left);
  const auto& rule = space.face_rule();
  const int nk = space.nk();
  std::vector<double> flux(rule.points.size());
  for (size_t q = 0; q < rule.points.size(); ++q) {
    double v = 0.0, b = 0.0;
    for (int i = 0; i < nk; ++i) {
      v += u.coeffs[e * nk + i] * t.V(i, static_cast<int>(q));
      b += u.coeffs[e * nk + i] * t.C(i, static_cast<int>(q));
    }
    const double uhat_q = eval(space, uhat, face, rule.points[q]);
    flux[q] = -sign * b + tau * (v - uhat_q);
  }
  return flux;
}

} // namespace uipdg
