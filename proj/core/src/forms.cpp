#include <uipdg/forms.hpp>

#include <cmath>

namespace uipdg {

void validate(const SchemeSpec& spec) {
  if (spec.epsilon != -1 && spec.epsilon != 0 && spec.epsilon != 1)
    throw ConfigError("epsilon must be one of -1, 0, +1; got " +
                      std::to_string(spec.epsilon));
  if (spec.scheme == SchemeKind::SWIP && spec.epsilon != 1)
    throw ConfigError("SWIP is symmetric only (epsilon = +1)");
  if (spec.degree < 1)
    throw ConfigError("polynomial degree must be >= 1");
  if (spec.alpha0 <= 0.0)
    throw ConfigError("penalty scaling alpha0 must be positive");
}

const char* scheme_name(SchemeKind scheme) {
  switch (scheme) {
  case SchemeKind::UIP:
    return "uip";
  case SchemeKind::SWIP:
    return "swip";
  default:
    return "ipf";
  }
}

BoundaryData BoundaryData::dirichlet(ScalarField g) {
  BoundaryData bc;
  bc.g_D = std::move(g);
  return bc;
}

BoundaryData BoundaryData::homogeneous() {
  return dirichlet([](const Vec2&) { return 0.0; });
}

namespace {

/// Per-side trace tables on one face: basis values and normal fluxes
/// (kappa grad phi_i) . n_F at the face quadrature points, with n_F the
/// face normal (out of the left element) for both sides.
struct SideTables {
  Eigen::MatrixXd V; ///< N_k x Q values
  Eigen::MatrixXd C; ///< N_k x Q normal fluxes
};

SideTables side_tables(const DGSpace& space, const DiffusionField& diffusion,
                       const Face& face, bool left_side) {
  const int e = left_side ? face.left : face.right;
  const int le = left_side ? face.left_local : face.right_local;
  const int dir = left_side ? 0 : 1;
  const auto& geom = space.geom(e);
  const Mat2& kappa =
      diffusion.tensor(space.mesh().triangles[e].subdomain);
  const Vec2 kn = kappa * face.normal; // (kappa grad phi) . n = grad phi . (kappa n)
  const Vec2 w = geom.Jinv * kn;        // pull back to reference gradients
  SideTables t;
  t.V = space.face_values(le, dir);
  t.C = space.face_gx(le, dir) * w.x() + space.face_gy(le, dir) * w.y();
  return t;
}

} // namespace

FaceTraceData face_traces(const DGSpace& space, const DGFunction& u, int face,
                          const FaceCoefficients& coeffs) {
  const Face& f = space.skeleton().faces[face];
  const auto& rule = space.face_rule();
  const int nq = static_cast<int>(rule.points.size());
  const int nk = space.nk();
  FaceTraceData data;
  data.left_value.resize(nq);
  data.left_grad.resize(nq);
  const bool interior = !f.is_boundary();
  if (interior) {
    data.right_value.resize(nq);
    data.right_grad.resize(nq);
  }
  data.jump.resize(nq);
  data.mean_w.resize(nq);
  data.conj_mean_w.resize(nq);

  const auto side_eval = [&](int e, int le, int dir, int q, double& val,
                             Vec2& grad) {
    const auto& V = space.face_values(le, dir);
    const auto& Gx = space.face_gx(le, dir);
    const auto& Gy = space.face_gy(le, dir);
    val = 0.0;
    Vec2 gref = Vec2::Zero();
    for (int i = 0; i < nk; ++i) {
      const double c = u.coeffs[e * nk + i];
      val += c * V(i, q);
      gref.x() += c * Gx(i, q);
      gref.y() += c * Gy(i, q);
    }
    grad = space.geom(e).Jinv.transpose() * gref;
  };

  for (int q = 0; q < nq; ++q) {
    side_eval(f.left, f.left_local, 0, q, data.left_value[q],
              data.left_grad[q]);
    if (interior) {
      side_eval(f.right, f.right_local, 1, q, data.right_value[q],
                data.right_grad[q]);
      data.jump[q] = data.left_value[q] - data.right_value[q];
      data.mean_w[q] = coeffs.omega1 * data.left_value[q] +
                       coeffs.omega2 * data.right_value[q];
      data.conj_mean_w[q] = coeffs.omega2 * data.left_value[q] +
                            coeffs.omega1 * data.right_value[q];
    } else {
      data.jump[q] = data.left_value[q];
      data.mean_w[q] = data.left_value[q];
      data.conj_mean_w[q] = data.left_value[q];
    }
  }
  return data;
}

std::pair<double, double>
identity_relation_check(const DGSpace& space, const VectorDGFunction& b,
                        const DGFunction& phi, const SkeletonFunction& phi_hat,
                        const std::vector<double>& omega1) {
  const auto& skel = space.skeleton();
  if (omega1.size() != skel.faces.size())
    throw ConfigError("weight table size does not match the skeleton");
  const int m = space.degree() + 1;
  for (int bf : skel.boundary)
    for (int i = 0; i < m; ++i)
      if (phi_hat.coeffs[bf * m + i] != 0.0)
        throw ConfigError("phi_hat must vanish on boundary faces");

  // Element-side loop, quadrature independent of the skeleton-side loop.
  const EdgeRule rule_e = edge_rule(2 * space.degree() + 3);
  double lhs = 0.0;
  for (int e = 0; e < space.mesh().num_triangles(); ++e) {
    for (int le = 0; le < 3; ++le) {
      const int fi = skel.element_faces[e][le];
      const Face& f = skel.faces[fi];
      // outward normal of this element on this face
      const double sign = (f.left == e) ? 1.0 : -1.0;
      for (size_t q = 0; q < rule_e.points.size(); ++q) {
        const double t = rule_e.points[q];
        const Vec2 ref = space.face_ref_point(f, e, t);
        const Vec2 bval(eval(space, b.x, e, ref), eval(space, b.y, e, ref));
        const double phival = eval(space, phi, e, ref);
        const double hatval = f.is_boundary() ? 0.0 : eval(space, phi_hat, fi, t);
        lhs += rule_e.weights[q] * f.length * sign * bval.dot(f.normal) *
               (phival - hatval);
      }
    }
  }

  const EdgeRule rule_s = edge_rule(2 * space.degree() + 2);
  double rhs = 0.0;
  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    const Face& f = skel.faces[fi];
    const double w1 = omega1[fi], w2 = 1.0 - w1;
    for (size_t q = 0; q < rule_s.points.size(); ++q) {
      const double t = rule_s.points[q];
      const double wq = rule_s.weights[q] * f.length;
      const Vec2 ref_l = space.face_ref_point(f, f.left, t);
      const Vec2 bl(eval(space, b.x, f.left, ref_l),
                    eval(space, b.y, f.left, ref_l));
      const double phil = eval(space, phi, f.left, ref_l);
      if (f.is_boundary()) {
        rhs += wq * bl.dot(f.normal) * phil;
        continue;
      }
      const Vec2 ref_r = space.face_ref_point(f, f.right, t);
      const Vec2 br(eval(space, b.x, f.right, ref_r),
                    eval(space, b.y, f.right, ref_r));
      const double phir = eval(space, phi, f.right, ref_r);
      const double conj_bn = (w2 * bl + w1 * br).dot(f.normal);
      const double jump_bn = (bl - br).dot(f.normal);
      const double mean_phi = w1 * phil + w2 * phir;
      const double hatval = eval(space, phi_hat, static_cast<int>(fi), t);
      rhs += wq * (conj_bn * (phil - phir) + jump_bn * (mean_phi - hatval));
    }
  }
  return {lhs, rhs};
}

namespace {

double consistency_impl(const DGSpace& space, const DiffusionField& diffusion,
                        const FaceCoefficientTable& coeffs, const DGFunction& v,
                        const DGFunction& w, bool decomposed) {
  const auto& skel = space.skeleton();
  const auto& rule = space.face_rule();
  const int nk = space.nk();
  double acc = 0.0;
  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    const Face& f = skel.faces[fi];
    const FaceCoefficients& c = coeffs.faces[fi];
    const SideTables tl = side_tables(space, diffusion, f, true);
    const auto wl = [&](int q) {
      double flux = 0.0, val = 0.0;
      for (int i = 0; i < nk; ++i) {
        flux += v.coeffs[f.left * nk + i] * tl.C(i, q);
        val += w.coeffs[f.left * nk + i] * tl.V(i, q);
      }
      return std::pair{flux, val};
    };
    if (f.is_boundary()) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const auto [flux, val] = wl(static_cast<int>(q));
        acc -= rule.weights[q] * f.length * flux * val;
      }
      continue;
    }
    const SideTables tr = side_tables(space, diffusion, f, false);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double flux_l = 0.0, flux_r = 0.0, val_l = 0.0, val_r = 0.0;
      for (int i = 0; i < nk; ++i) {
        flux_l += v.coeffs[f.left * nk + i] * tl.C(i, static_cast<int>(q));
        flux_r += v.coeffs[f.right * nk + i] * tr.C(i, static_cast<int>(q));
        val_l += w.coeffs[f.left * nk + i] * tl.V(i, static_cast<int>(q));
        val_r += w.coeffs[f.right * nk + i] * tr.V(i, static_cast<int>(q));
      }
      const double wq = rule.weights[q] * f.length;
      const double jump_w = val_l - val_r;
      if (!decomposed) {
        acc -= wq * (c.omega2 * flux_l + c.omega1 * flux_r) * jump_w;
      } else {
        acc -= wq * 0.5 * (flux_l + flux_r) * jump_w;
        acc += wq * c.gamma_n * (flux_l - flux_r) * jump_w;
      }
    }
  }
  return acc;
}

} // namespace

double consistency_form(const DGSpace& space, const DiffusionField& diffusion,
                        const FaceCoefficientTable& coeffs,
                        const DGFunction& v, const DGFunction& w) {
  return consistency_impl(space, diffusion, coeffs, v, w, false);
}

double consistency_form_decomposed(const DGSpace& space,
                                   const DiffusionField& diffusion,
                                   const FaceCoefficientTable& coeffs,
                                   const DGFunction& v, const DGFunction& w) {
  return consistency_impl(space, diffusion, coeffs, v, w, true);
}

LinearSystem assemble(const DGSpace& space, const DiffusionField& diffusion,
                      const FaceCoefficientTable& coeffs,
                      const SchemeSpec& spec, const ScalarField& f,
                      const BoundaryData& bc) {
  validate(spec);
  if (coeffs.scheme != spec.scheme)
    throw ConfigError("face coefficients were built for a different scheme");
  if (coeffs.degree != spec.degree || space.degree() != spec.degree)
    throw ConfigError("degree mismatch between space, coefficients, and "
                      "scheme spec");
  if (coeffs.alpha0 != spec.alpha0)
    throw ConfigError("alpha0 mismatch between coefficients and scheme spec");
  if (space.quad_degree() < 2 * spec.degree + 2)
    throw ConfigError("quadrature degree " +
                      std::to_string(space.quad_degree()) +
                      " is insufficient for assembly (need 2k+2)");
  if (!bc.g_D)
    throw ConfigError("boundary data lacks a Dirichlet value function");
  const auto& skel = space.skeleton();
  for (int bf : skel.boundary)
    if (skel.faces[bf].marker == BoundaryKind::Neumann && !bc.g_N)
      throw ConfigError("mesh has Neumann faces but no g_N was provided");

  const Mesh& mesh = space.mesh();
  const int nk = space.nk();
  const int ne = mesh.num_triangles();
  const double eps = spec.epsilon;

  BlockSparseBuilder builder(ne, nk);
  for (int e = 0; e < ne; ++e)
    builder.add_coupling(e, e);
  for (int fi : skel.interior) {
    const Face& face = skel.faces[fi];
    builder.add_coupling(face.left, face.right);
    builder.add_coupling(face.right, face.left);
  }
  builder.finalize_pattern();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_dofs());

  // volume terms
  const auto& vrule = space.volume_rule();
  const int nvq = static_cast<int>(vrule.nodes.size());
  Eigen::MatrixXd K(nk, nk), P(2, nk);
  for (int e = 0; e < ne; ++e) {
    const auto& geom = space.geom(e);
    const Mat2& kappa = diffusion.tensor(mesh.triangles[e].subdomain);
    K.setZero();
    for (int q = 0; q < nvq; ++q) {
      P = geom.Jinv.transpose() *
          (Eigen::MatrixXd(2, nk) << space.vol_gx().col(q).transpose(),
           space.vol_gy().col(q).transpose())
              .finished();
      K.noalias() +=
          (vrule.nodes[q].w * geom.detJ) * P.transpose() * (kappa * P);
      const double fw = f(space.volume_point(e, q)) * vrule.nodes[q].w * geom.detJ;
      for (int i = 0; i < nk; ++i)
        rhs[e * nk + i] += fw * space.vol_values()(i, q);
    }
    builder.add_block(e, e, K);
  }

  // face terms
  const auto& frule = space.face_rule();
  const int nfq = static_cast<int>(frule.points.size());
  Eigen::VectorXd W(nfq);
  Eigen::MatrixXd B(nk, nk);
  for (size_t fi = 0; fi < skel.faces.size(); ++fi) {
    const Face& face = skel.faces[fi];
    const FaceCoefficients& c = coeffs.faces[fi];
    for (int q = 0; q < nfq; ++q)
      W[q] = frule.weights[q] * face.length;

    if (face.is_boundary()) {
      if (face.marker == BoundaryKind::Neumann) {
        const SideTables t = side_tables(space, diffusion, face, true);
        for (int q = 0; q < nfq; ++q) {
          const double gw = bc.g_N(space.face_point(face, q)) * W[q];
          for (int i = 0; i < nk; ++i)
            rhs[face.left * nk + i] -= gw * t.V(i, q);
        }
        continue;
      }
      const SideTables t = side_tables(space, diffusion, face, true);
      B.noalias() = -t.V * W.asDiagonal() * t.C.transpose();
      B.noalias() += (-eps) * t.C * W.asDiagonal() * t.V.transpose();
      B.noalias() += c.rho0 * t.V * W.asDiagonal() * t.V.transpose();
      builder.add_block(face.left, face.left, B);
      // The Dirichlet data enters the load vector through the same two terms
      // that act on the trial trace in the bilinear form: the adjoint flux
      // term keeps its -eps sign so that inserting the exact solution
      // reproduces the volume residual identically (nonzero g_D otherwise
      // loses consistency for eps = +-1).
      for (int q = 0; q < nfq; ++q) {
        const double g = bc.g_D(space.face_point(face, q)) * W[q];
        for (int i = 0; i < nk; ++i)
          rhs[face.left * nk + i] += g * (-eps * t.C(i, q) + c.rho0 * t.V(i, q));
      }
      continue;
    }

    const SideTables ts[2] = {side_tables(space, diffusion, face, true),
                              side_tables(space, diffusion, face, false)};
    const int elem[2] = {face.left, face.right};
    const double sign[2] = {1.0, -1.0};          // jump sign per side
    const double wconj[2] = {c.omega2, c.omega1}; // conjugate flux weights
    for (int s = 0; s < 2; ++s) {
      for (int t = 0; t < 2; ++t) {
        B.noalias() = (-wconj[t] * sign[s]) * ts[s].V * W.asDiagonal() *
                      ts[t].C.transpose();
        B.noalias() += (-eps * wconj[s] * sign[t]) * ts[s].C * W.asDiagonal() *
                       ts[t].V.transpose();
        B.noalias() += (c.rho0 * sign[s] * sign[t]) * ts[s].V * W.asDiagonal() *
                       ts[t].V.transpose();
        if (c.rho1 != 0.0)
          B.noalias() += (-eps * c.rho1 * sign[s] * sign[t]) * ts[s].C *
                         W.asDiagonal() * ts[t].C.transpose();
        builder.add_block(elem[s], elem[t], B);
      }
    }
  }

  LinearSystem sys;
  sys.A = builder.take();
  sys.b = std::move(rhs);
  return sys;
}

} // namespace uipdg
