#include <uipdg/mesh.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace uipdg;

namespace {

Mesh two_triangle_square() {
  Mesh mesh;
  mesh.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  mesh.triangles = {{{0, 1, 2}, 1}, {{0, 2, 3}, 2}};
  return mesh;
}

} // namespace

TEST(StructuredMesh, CountsSatisfyEuler) {
  const Mesh mesh = generate_structured(2, {0, 0, 1, 1});
  EXPECT_EQ(mesh.num_vertices(), 9);
  EXPECT_EQ(mesh.num_triangles(), 8);
  const Skeleton skel = build_skeleton(mesh);
  EXPECT_EQ(skel.faces.size(), 16u);
  EXPECT_EQ(skel.boundary.size(), 8u);
  EXPECT_EQ(skel.interior.size(), 8u);
  // Euler: V - E + T = 1 for a disc.
  EXPECT_EQ(mesh.num_vertices() - 16 + mesh.num_triangles(), 1);
}

TEST(StructuredMesh, PositiveOrientationAndAreaSum) {
  for (int n : {1, 2, 4, 6}) {
    const Mesh mesh = generate_structured(n, {-1, -1, 1, 1});
    double total = 0.0;
    for (int e = 0; e < mesh.num_triangles(); ++e) {
      EXPECT_GT(mesh.area(e), 0.0);
      total += mesh.area(e);
    }
    EXPECT_NEAR(total, 4.0, 1e-13);
    EXPECT_NO_THROW(validate(mesh));
  }
}

TEST(StructuredMesh, DiameterIsLongestEdge) {
  const Mesh mesh = generate_structured(2, {0, 0, 1, 1});
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    double longest = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Vec2 d = mesh.vertices[mesh.triangles[e].v[(c + 1) % 3]] -
                     mesh.vertices[mesh.triangles[e].v[c]];
      longest = std::max(longest, d.norm());
    }
    EXPECT_DOUBLE_EQ(mesh.diameter(e), longest);
    // Right isoceles cells: hypotenuse sqrt(2)/n.
    EXPECT_NEAR(mesh.diameter(e), std::sqrt(2.0) / 2.0, 1e-14);
  }
}

TEST(StructuredMesh, AlternatingDiagonals) {
  // Neighboring cells split along different diagonals, so across any
  // interior mesh line the pattern is a checkerboard.  Detect the diagonal
  // of a cell by which corner pair appears as an element edge.
  const int n = 4;
  const Mesh mesh = generate_structured(n, {0, 0, 1, 1});
  ASSERT_EQ(mesh.diagonal_rule, "alternate");
  const auto vertex_id = [&](int i, int j) { return j * (n + 1) + i; };
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) {
      int a = t.v[c], b = t.v[(c + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  int style = -1; // style of cell (0,0): 0 = BL-TR diagonal, 1 = BR-TL
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int bl = vertex_id(i, j), br = vertex_id(i + 1, j);
      const int tl = vertex_id(i, j + 1), tr = vertex_id(i + 1, j + 1);
      const bool has_main =
          edges.count({std::min(bl, tr), std::max(bl, tr)}) > 0;
      const bool has_anti =
          edges.count({std::min(br, tl), std::max(br, tl)}) > 0;
      EXPECT_NE(has_main, has_anti) << "cell (" << i << "," << j << ")";
      const int this_style = has_main ? 0 : 1;
      if (style < 0)
        style = (i + j) % 2 == 0 ? this_style : 1 - this_style;
      EXPECT_EQ(this_style, (i + j) % 2 == 0 ? style : 1 - style);
    }
}

TEST(StructuredMesh, QuadrantPartitionBySubdomainCentroid) {
  const Mesh mesh = generate_structured(4, {0, 0, 1, 1}, Partition::Quadrant);
  int counts[5] = {0, 0, 0, 0, 0};
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const int s = mesh.triangles[e].subdomain;
    ASSERT_GE(s, 1);
    ASSERT_LE(s, 4);
    ++counts[s];
    const Vec2 c = mesh.centroid(e);
    const bool east = c.x() > 0.5, north = c.y() > 0.5;
    const int expected = north ? (east ? 3 : 4) : (east ? 2 : 1);
    EXPECT_EQ(s, expected);
  }
  for (int s = 1; s <= 4; ++s)
    EXPECT_EQ(counts[s], 8);
}

TEST(StructuredMesh, RejectsBadRequests) {
  EXPECT_THROW(generate_structured(0, {0, 0, 1, 1}), ConfigError);
  EXPECT_THROW(generate_structured(3, {0, 0, 1, 1}, Partition::Quadrant),
               ConfigError);
  EXPECT_THROW(generate_structured(2, {0, 0, 0, 1}), ConfigError);
}

TEST(Validate, CatchesStructuralDefects) {
  {
    Mesh mesh = two_triangle_square();
    std::swap(mesh.triangles[0].v[0], mesh.triangles[0].v[1]); // clockwise
    EXPECT_THROW(validate(mesh), TopologyError);
  }
  {
    Mesh mesh = two_triangle_square();
    mesh.vertices.push_back(mesh.vertices[1]); // duplicate vertex
    EXPECT_THROW(validate(mesh), TopologyError);
  }
  {
    Mesh mesh = two_triangle_square();
    mesh.triangles.push_back({{0, 1, 2}, 1}); // edge shared three times
    EXPECT_THROW(validate(mesh), TopologyError);
  }
}

TEST(Skeleton, OrientationConventions) {
  const Mesh mesh = generate_structured(4, {0, 0, 1, 1});
  const Skeleton skel = build_skeleton(mesh);
  const Vec2 center(0.5, 0.5);
  for (const Face& f : skel.faces) {
    const Vec2 a = mesh.vertices[f.a], b = mesh.vertices[f.b];
    const Vec2 d = b - a;
    EXPECT_NEAR(f.length, d.norm(), 1e-14);
    // normal = rotate the edge direction by -90 degrees
    EXPECT_NEAR(f.normal.x(), d.y() / d.norm(), 1e-14);
    EXPECT_NEAR(f.normal.y(), -d.x() / d.norm(), 1e-14);
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-14);
    if (f.is_boundary()) {
      // outward: away from the domain center
      const Vec2 mid = 0.5 * (a + b);
      EXPECT_GT(f.normal.dot(mid - center), 0.0);
    } else {
      EXPECT_LT(f.left, f.right);
      EXPECT_GT(f.normal.dot(mesh.centroid(f.right) - mesh.centroid(f.left)),
                0.0);
    }
    // (a, b) appear consecutively in the left triangle's CCW vertex list
    const auto& tv = mesh.triangles[f.left].v;
    bool found = false;
    for (int c = 0; c < 3; ++c)
      if (tv[c] == f.a && tv[(c + 1) % 3] == f.b) {
        EXPECT_EQ(f.left_local, c);
        found = true;
      }
    EXPECT_TRUE(found);
  }
}

TEST(Skeleton, ElementFaceTableRoundTrips) {
  const Mesh mesh = generate_structured(4, {0, 0, 1, 1});
  const Skeleton skel = build_skeleton(mesh);
  ASSERT_EQ(skel.element_faces.size(), static_cast<size_t>(mesh.num_triangles()));
  for (int e = 0; e < mesh.num_triangles(); ++e)
    for (int le = 0; le < 3; ++le) {
      const int fi = skel.element_faces[e][le];
      ASSERT_GE(fi, 0);
      const Face& f = skel.faces[fi];
      if (f.left == e)
        EXPECT_EQ(f.left_local, le);
      else {
        EXPECT_EQ(f.right, e);
        EXPECT_EQ(f.right_local, le);
      }
    }
}

TEST(Skeleton, BoundaryOverridesSetMarkers) {
  Mesh mesh = generate_structured(2, {0, 0, 1, 1});
  // right edge x = 1: vertices with index i = 2 in a 3x3 grid
  mesh.boundary_overrides.push_back({2, 5, BoundaryKind::Neumann});
  mesh.boundary_overrides.push_back({5, 8, BoundaryKind::Neumann});
  const Skeleton skel = build_skeleton(mesh);
  int neumann = 0;
  for (int fi : skel.boundary) {
    const Face& f = skel.faces[fi];
    const bool on_right = mesh.vertices[f.a].x() == 1.0 &&
                          mesh.vertices[f.b].x() == 1.0;
    EXPECT_EQ(f.marker == BoundaryKind::Neumann, on_right);
    neumann += f.marker == BoundaryKind::Neumann;
  }
  EXPECT_EQ(neumann, 2);

  mesh.boundary_overrides.push_back({0, 4, BoundaryKind::Neumann}); // interior
  EXPECT_THROW(build_skeleton(mesh), TopologyError);
}

TEST(Refine, FourToOneWithInheritance) {
  const Mesh coarse =
      generate_structured(2, {0, 0, 1, 1}, Partition::Quadrant);
  const Mesh fine = refine_uniform(coarse);
  EXPECT_EQ(fine.num_triangles(), 4 * coarse.num_triangles());
  // V_fine = V + E (one new vertex per edge)
  EXPECT_EQ(fine.num_vertices(), 9 + 16);
  EXPECT_NO_THROW(validate(fine));
  double total = 0.0;
  for (int e = 0; e < fine.num_triangles(); ++e)
    total += fine.area(e);
  EXPECT_NEAR(total, 1.0, 1e-13);
  for (int e = 0; e < fine.num_triangles(); ++e) {
    const Vec2 c = fine.centroid(e);
    const bool east = c.x() > 0.5, north = c.y() > 0.5;
    const int expected = north ? (east ? 3 : 4) : (east ? 2 : 1);
    EXPECT_EQ(fine.triangles[e].subdomain, expected);
  }
}

TEST(Refine, CarriesBoundaryOverrides) {
  Mesh mesh = generate_structured(2, {0, 0, 1, 1});
  mesh.boundary_overrides.push_back({2, 5, BoundaryKind::Neumann});
  const Mesh fine = refine_uniform(mesh);
  const Skeleton skel = build_skeleton(fine);
  int neumann = 0;
  for (int fi : skel.boundary)
    neumann += skel.faces[fi].marker == BoundaryKind::Neumann;
  EXPECT_EQ(neumann, 2); // the override edge split into two children
}

TEST(MeshIO, RoundTripIsByteStable) {
  Mesh mesh = generate_structured(3, {0, 0, 2, 1});
  mesh.boundary_overrides.push_back({0, 1, BoundaryKind::Neumann});
  std::ostringstream first;
  write_mesh(mesh, first);
  std::istringstream in(first.str());
  const Mesh back = read_mesh(in);
  EXPECT_EQ(back.num_vertices(), mesh.num_vertices());
  EXPECT_EQ(back.num_triangles(), mesh.num_triangles());
  ASSERT_EQ(back.boundary_overrides.size(), 1u);
  EXPECT_EQ(back.boundary_overrides[0].kind, BoundaryKind::Neumann);
  std::ostringstream second;
  write_mesh(back, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(MeshIO, ParseErrorsCarryLineNumbers) {
  const auto expect_line = [](const std::string& text, const char* fragment) {
    std::istringstream in(text);
    try {
      read_mesh(in);
      FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
          << e.what();
    }
  };
  expect_line("WRONG 1\n", "line 1");
  expect_line("UIPDG-MESH 2\n", "line 1");
  expect_line("UIPDG-MESH 1\nbogus\n", "line 2");
  expect_line("UIPDG-MESH 1\n3 1\n0 0\n1 0\n0 1\n0 1 5 1\n", "line 6");
  expect_line("UIPDG-MESH 1\n3 1\n0 0\n1 0\n0 1\n", "line 6"); // truncated
  expect_line("UIPDG-MESH 1\n3 1\n0 0\n1 0\n0 1\n0 1 2 1\nB 0 1 X\n",
              "line 7");
}

TEST(MeshIO, BlankLinesAreSkipped) {
  std::istringstream in(
      "UIPDG-MESH 1\n\n3 1\n0 0\n1 0\n\n0 1\n0 1 2 1\n\n");
  const Mesh mesh = read_mesh(in);
  EXPECT_EQ(mesh.num_triangles(), 1);
}
