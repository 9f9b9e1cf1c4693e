// Conforming triangle meshes, structured generation, uniform refinement,
// the oriented face skeleton, and the plain-text mesh format.
#pragma once

#include <uipdg/types.hpp>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace uipdg {

enum class BoundaryKind { Dirichlet, Neumann };

enum class Partition {
  Single,  ///< every triangle gets subdomain 1
  Quadrant ///< subdomains 1..4 = SW, SE, NE, NW by centroid; needs even n
};

struct Triangle {
  std::array<int, 3> v; ///< vertex ids, counterclockwise
  int subdomain = 1;
};

/// Boundary-marker override attached to the edge {a, b}.
struct BoundaryOverride {
  int a = 0, b = 0;
  BoundaryKind kind = BoundaryKind::Dirichlet;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryOverride> boundary_overrides;
  /// Diagonal-split rule of the generator ("alternate"), empty for meshes
  /// from other sources.  Reported in run metadata; not part of the file
  /// format.
  std::string diagonal_rule;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double area(int e) const;
  Vec2 centroid(int e) const;
  /// Element diameter: the longest edge.
  double diameter(int e) const;
};

/// Oriented mesh face.  Endpoints (a, b) are stored in the left element's
/// counterclockwise order, so the unit normal points out of the left element
/// (and into the right one when present).
struct Face {
  int a = -1, b = -1;
  int left = -1, right = -1;           ///< right = -1 on the boundary
  int left_local = -1, right_local = -1; ///< local edge index 0..2
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
  BoundaryKind marker = BoundaryKind::Dirichlet; ///< boundary faces only

  bool is_boundary() const { return right < 0; }
};

struct Skeleton {
  std::vector<Face> faces;
  std::vector<int> interior; ///< face indices, ascending
  std::vector<int> boundary; ///< face indices, ascending
  /// face index per element and local edge
  std::vector<std::array<int, 3>> element_faces;
};

/// Structured mesh on an axis-aligned box: n x n cells, two triangles per
/// cell with the diagonal direction alternating in a checkerboard pattern.
/// Partition::Quadrant requires even n so subdomain interfaces align with
/// mesh lines.
Mesh generate_structured(int n, const BoundingBox& domain,
                         Partition partition = Partition::Single);

/// Red refinement: every triangle splits into four via edge midpoints.
/// Subdomain ids and boundary overrides carry over.
Mesh refine_uniform(const Mesh& mesh);

/// Structural checks: positive orientation, no duplicate vertices within
/// `tol`, every edge shared by at most two triangles.  Throws TopologyError.
void validate(const Mesh& mesh, double tol = 1e-12);

/// Builds the oriented skeleton.  Faces are ordered by first encounter while
/// scanning elements in index order, so the left element always has the
/// lower index.  Boundary faces default to Dirichlet; overrides naming a
/// non-boundary edge throw TopologyError.
Skeleton build_skeleton(const Mesh& mesh);

/// Plain-text mesh I/O.  Parse errors carry the 1-based line number.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh_file(const Mesh& mesh, const std::string& path);

} // namespace uipdg
