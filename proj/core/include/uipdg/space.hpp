// Broken polynomial spaces on a triangle mesh and modal functions on the
// face skeleton, with cached basis tables at quadrature points.
#pragma once

#include <uipdg/basis.hpp>
#include <uipdg/mesh.hpp>
#include <uipdg/quadrature.hpp>

#include <functional>

namespace uipdg {

using ScalarField = std::function<double(const Vec2&)>;

/// Per-element affine geometry: x = p0 + J * ref.
struct ElementGeometry {
  Vec2 p0 = Vec2::Zero();
  Mat2 J = Mat2::Identity();
  Mat2 Jinv = Mat2::Identity();
  double detJ = 1.0; ///< equals 2 |E| for counterclockwise elements
  double area = 0.0;
  double h = 0.0; ///< longest edge
};

/// Discontinuous space P_k on every element, plus the tables shared by
/// assembly and error evaluation: basis values/reference gradients at the
/// volume rule and at the face rule for every local edge and traversal
/// direction.
class DGSpace {
public:
  /// `quad_degree` < 0 selects the default 2k + 2.
  DGSpace(const Mesh& mesh, const Skeleton& skeleton, int degree,
          int quad_degree = -1);

  const Mesh& mesh() const { return *mesh_; }
  const Skeleton& skeleton() const { return *skeleton_; }
  int degree() const { return degree_; }
  int nk() const { return nk_; }
  int num_dofs() const { return nk_ * mesh_->num_triangles(); }
  int quad_degree() const { return quad_degree_; }

  const ElementGeometry& geom(int e) const { return geom_[e]; }

  const TriangleRule& volume_rule() const { return volume_rule_; }
  const EdgeRule& face_rule() const { return face_rule_; }

  /// N_k x Q basis values at the volume rule.
  const Eigen::MatrixXd& vol_values() const { return vol_values_; }
  /// Reference-gradient components at the volume rule, N_k x Q each.
  const Eigen::MatrixXd& vol_gx() const { return vol_gx_; }
  const Eigen::MatrixXd& vol_gy() const { return vol_gy_; }

  /// Face-trace tables indexed by local edge 0..2 and direction
  /// (0 = the face parameter runs along the element's own edge direction,
  /// 1 = reversed).  The left element of a face always uses direction 0 and
  /// the right element direction 1.
  const Eigen::MatrixXd& face_values(int local_edge, int dir) const {
    return face_values_[local_edge][dir];
  }
  const Eigen::MatrixXd& face_gx(int local_edge, int dir) const {
    return face_gx_[local_edge][dir];
  }
  const Eigen::MatrixXd& face_gy(int local_edge, int dir) const {
    return face_gy_[local_edge][dir];
  }

  /// Physical coordinates of volume quadrature node q in element e.
  Vec2 volume_point(int e, int q) const;
  /// Physical coordinates of face quadrature node q on face f.
  Vec2 face_point(const Face& f, int q) const;
  /// Reference coordinates in the given element of the point at face
  /// parameter t (requires the element to be a side of the face).
  Vec2 face_ref_point(const Face& f, int element, double t) const;

private:
  const Mesh* mesh_;
  const Skeleton* skeleton_;
  int degree_, nk_, quad_degree_;
  std::vector<ElementGeometry> geom_;
  TriangleRule volume_rule_;
  EdgeRule face_rule_;
  Eigen::MatrixXd vol_values_, vol_gx_, vol_gy_;
  Eigen::MatrixXd face_values_[3][2], face_gx_[3][2], face_gy_[3][2];
};

/// Coefficients of a broken P_k function, element-major.
struct DGFunction {
  int degree = 0;
  Eigen::VectorXd coeffs;
};

DGFunction zero_function(const DGSpace& space);

/// Value / gradient of u at a reference point of element e.
double eval(const DGSpace& space, const DGFunction& u, int e, const Vec2& ref);
Vec2 eval_grad(const DGSpace& space, const DGFunction& u, int e,
               const Vec2& ref);

/// Elementwise L2 projection; exact inversion of the diagonal mass matrix.
DGFunction l2_project(const DGSpace& space, const ScalarField& f);

/// Modal function on the skeleton: k+1 orthonormal Legendre coefficients per
/// face (all faces; boundary blocks hold imposed Dirichlet moments or zero),
/// in the face's stored parameterization from vertex a to vertex b.
struct SkeletonFunction {
  int degree = 0;
  Eigen::VectorXd coeffs;
};

SkeletonFunction zero_skeleton_function(const DGSpace& space);

double eval(const DGSpace& space, const SkeletonFunction& w, int face,
            double t);

/// Face-wise L2 projection of a scalar field onto P_k of each face.
SkeletonFunction project_skeleton(const DGSpace& space, const ScalarField& g);

/// Uniform-bin point locator for sampling broken functions on grids.
class PointLocator {
public:
  explicit PointLocator(const Mesh& mesh);
  /// Returns the containing element (ties resolved by lowest index) and
  /// fills `ref`; returns -1 when the point is outside the mesh.
  int locate(const Vec2& p, Vec2& ref) const;

private:
  const Mesh* mesh_;
  BoundingBox box_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> bins_;
};

} // namespace uipdg
