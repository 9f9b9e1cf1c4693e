#include <uipdg/space.hpp>

#include <algorithm>
#include <cmath>

namespace uipdg {

namespace {

// Reference coordinates of the point at arc parameter s in [0,1] along local
// edge `le`, traversed in the element's own counterclockwise direction.
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

} // namespace

DGSpace::DGSpace(const Mesh& mesh, const Skeleton& skeleton, int degree,
                 int quad_degree)
    : mesh_(&mesh), skeleton_(&skeleton), degree_(degree),
      nk_(space_dim(degree)),
      quad_degree_(quad_degree < 0 ? 2 * degree + 2 : quad_degree) {
  if (degree < 1)
    throw ConfigError("polynomial degree must be >= 1");

  geom_.resize(mesh.num_triangles());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    ElementGeometry g;
    g.p0 = mesh.vertices[t.v[0]];
    g.J.col(0) = mesh.vertices[t.v[1]] - g.p0;
    g.J.col(1) = mesh.vertices[t.v[2]] - g.p0;
    g.detJ = g.J.determinant();
    g.area = 0.5 * g.detJ;
    g.Jinv = g.J.inverse();
    g.h = mesh.diameter(e);
    geom_[e] = g;
  }

  volume_rule_ = triangle_rule(quad_degree_);
  face_rule_ = edge_rule(quad_degree_);

  const int nq = static_cast<int>(volume_rule_.nodes.size());
  vol_values_.resize(nk_, nq);
  vol_gx_.resize(nk_, nq);
  vol_gy_.resize(nk_, nq);
  std::vector<double> vals(nk_), gx(nk_), gy(nk_);
  for (int q = 0; q < nq; ++q) {
    const auto& node = volume_rule_.nodes[q];
    dubiner_eval(degree_, node.x, node.y, vals.data());
    dubiner_grad(degree_, node.x, node.y, gx.data(), gy.data());
    for (int i = 0; i < nk_; ++i) {
      vol_values_(i, q) = vals[i];
      vol_gx_(i, q) = gx[i];
      vol_gy_(i, q) = gy[i];
    }
  }

  const int nfq = static_cast<int>(face_rule_.points.size());
  for (int le = 0; le < 3; ++le) {
    for (int dir = 0; dir < 2; ++dir) {
      auto& V = face_values_[le][dir];
      auto& Gx = face_gx_[le][dir];
      auto& Gy = face_gy_[le][dir];
      V.resize(nk_, nfq);
      Gx.resize(nk_, nfq);
      Gy.resize(nk_, nfq);
      for (int q = 0; q < nfq; ++q) {
        const double t = face_rule_.points[q];
        const Vec2 r = edge_ref(le, dir == 0 ? t : 1.0 - t);
        dubiner_eval(degree_, r.x(), r.y(), vals.data());
        dubiner_grad(degree_, r.x(), r.y(), gx.data(), gy.data());
        for (int i = 0; i < nk_; ++i) {
          V(i, q) = vals[i];
          Gx(i, q) = gx[i];
          Gy(i, q) = gy[i];
        }
      }
    }
  }
}

Vec2 DGSpace::volume_point(int e, int q) const {
  const auto& g = geom_[e];
  const auto& node = volume_rule_.nodes[q];
  return g.p0 + g.J * Vec2(node.x, node.y);
}

Vec2 DGSpace::face_point(const Face& f, int q) const {
  const double t = face_rule_.points[q];
  const Vec2& pa = mesh_->vertices[f.a];
  const Vec2& pb = mesh_->vertices[f.b];
  return pa + t * (pb - pa);
}

Vec2 DGSpace::face_ref_point(const Face& f, int element, double t) const {
  int le;
  double s;
  if (element == f.left) {
    le = f.left_local;
    s = t;
  } else if (element == f.right) {
    le = f.right_local;
    s = 1.0 - t;
  } else {
    throw Error("element is not a side of the face");
  }
  return edge_ref(le, s);
}

DGFunction zero_function(const DGSpace& space) {
  DGFunction u;
  u.degree = space.degree();
  u.coeffs = Eigen::VectorXd::Zero(space.num_dofs());
  return u;
}

double eval(const DGSpace& space, const DGFunction& u, int e, const Vec2& ref) {
  const int nk = space.nk();
  std::vector<double> vals(nk);
  dubiner_eval(space.degree(), ref.x(), ref.y(), vals.data());
  double s = 0.0;
  for (int i = 0; i < nk; ++i)
    s += u.coeffs[e * nk + i] * vals[i];
  return s;
}

Vec2 eval_grad(const DGSpace& space, const DGFunction& u, int e,
               const Vec2& ref) {
  const int nk = space.nk();
  std::vector<double> gx(nk), gy(nk);
  dubiner_grad(space.degree(), ref.x(), ref.y(), gx.data(), gy.data());
  Vec2 gref = Vec2::Zero();
  for (int i = 0; i < nk; ++i) {
    gref.x() += u.coeffs[e * nk + i] * gx[i];
    gref.y() += u.coeffs[e * nk + i] * gy[i];
  }
  return space.geom(e).Jinv.transpose() * gref;
}

DGFunction l2_project(const DGSpace& space, const ScalarField& f) {
  DGFunction u = zero_function(space);
  const int nk = space.nk();
  const auto& rule = space.volume_rule();
  const auto& V = space.vol_values();
  // Mass and load both scale with det J, so the projection coefficients are
  // reference-rule sums independent of the element geometry.
  for (int e = 0; e < space.mesh().num_triangles(); ++e) {
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double fw = f(space.volume_point(e, static_cast<int>(q))) *
                        rule.nodes[q].w;
      for (int i = 0; i < nk; ++i)
        u.coeffs[e * nk + i] += fw * V(i, static_cast<int>(q));
    }
  }
  return u;
}

SkeletonFunction zero_skeleton_function(const DGSpace& space) {
  SkeletonFunction w;
  w.degree = space.degree();
  w.coeffs = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(space.skeleton().faces.size()) *
      (space.degree() + 1));
  return w;
}

double eval(const DGSpace& space, const SkeletonFunction& w, int face,
            double t) {
  const int m = space.degree() + 1;
  std::vector<double> vals(m);
  edge_basis_eval(space.degree(), t, vals.data());
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    s += w.coeffs[face * m + i] * vals[i];
  return s;
}

SkeletonFunction project_skeleton(const DGSpace& space, const ScalarField& g) {
  SkeletonFunction w = zero_skeleton_function(space);
  const int m = space.degree() + 1;
  const auto& rule = space.face_rule();
  std::vector<double> vals(m);
  for (size_t f = 0; f < space.skeleton().faces.size(); ++f) {
    const Face& face = space.skeleton().faces[f];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double gw =
          g(space.face_point(face, static_cast<int>(q))) * rule.weights[q];
      edge_basis_eval(space.degree(), rule.points[q], vals.data());
      for (int i = 0; i < m; ++i)
        w.coeffs[f * m + i] += gw * vals[i];
    }
  }
  return w;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  box_.xmin = box_.ymin = std::numeric_limits<double>::max();
  box_.xmax = box_.ymax = std::numeric_limits<double>::lowest();
  for (const auto& v : mesh.vertices) {
    box_.xmin = std::min(box_.xmin, v.x());
    box_.xmax = std::max(box_.xmax, v.x());
    box_.ymin = std::min(box_.ymin, v.y());
    box_.ymax = std::max(box_.ymax, v.y());
  }
  const int n = std::max(
      1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nx_ = ny_ = n;
  bins_.assign(static_cast<size_t>(nx_) * ny_, {});
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    double exmin = std::numeric_limits<double>::max(), exmax = -exmin;
    double eymin = exmin, eymax = -exmin;
    for (int c = 0; c < 3; ++c) {
      const Vec2& v = mesh.vertices[mesh.triangles[e].v[c]];
      exmin = std::min(exmin, v.x());
      exmax = std::max(exmax, v.x());
      eymin = std::min(eymin, v.y());
      eymax = std::max(eymax, v.y());
    }
    const auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };
    const int i0 = clampi(static_cast<int>((exmin - box_.xmin) / box_.width() * nx_), nx_);
    const int i1 = clampi(static_cast<int>((exmax - box_.xmin) / box_.width() * nx_), nx_);
    const int j0 = clampi(static_cast<int>((eymin - box_.ymin) / box_.height() * ny_), ny_);
    const int j1 = clampi(static_cast<int>((eymax - box_.ymin) / box_.height() * ny_), ny_);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins_[static_cast<size_t>(j) * nx_ + i].push_back(e);
  }
}

int PointLocator::locate(const Vec2& p, Vec2& ref) const {
  if (p.x() < box_.xmin - 1e-12 || p.x() > box_.xmax + 1e-12 ||
      p.y() < box_.ymin - 1e-12 || p.y() > box_.ymax + 1e-12)
    return -1;
  const auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };
  const int bi = clampi(static_cast<int>((p.x() - box_.xmin) / box_.width() * nx_), nx_);
  const int bj = clampi(static_cast<int>((p.y() - box_.ymin) / box_.height() * ny_), ny_);
  for (int e : bins_[static_cast<size_t>(bj) * nx_ + bi]) {
    const auto& t = mesh_->triangles[e];
    const Vec2& p0 = mesh_->vertices[t.v[0]];
    Mat2 J;
    J.col(0) = mesh_->vertices[t.v[1]] - p0;
    J.col(1) = mesh_->vertices[t.v[2]] - p0;
    const Vec2 r = J.inverse() * (p - p0);
    if (r.x() >= -1e-10 && r.y() >= -1e-10 && r.x() + r.y() <= 1.0 + 1e-10) {
      ref = r;
      return e;
    }
  }
  return -1;
}

} // namespace uipdg
