#include <uipdg/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace uipdg {

double Mesh::area(int e) const {
  const auto& t = triangles[e];
  const Vec2 u = vertices[t.v[1]] - vertices[t.v[0]];
  const Vec2 w = vertices[t.v[2]] - vertices[t.v[0]];
  return 0.5 * (u.x() * w.y() - u.y() * w.x());
}

Vec2 Mesh::centroid(int e) const {
  const auto& t = triangles[e];
  return (vertices[t.v[0]] + vertices[t.v[1]] + vertices[t.v[2]]) / 3.0;
}

double Mesh::diameter(int e) const {
  const auto& t = triangles[e];
  double h = 0.0;
  for (int i = 0; i < 3; ++i)
    h = std::max(h, (vertices[t.v[(i + 1) % 3]] - vertices[t.v[i]]).norm());
  return h;
}

Mesh generate_structured(int n, const BoundingBox& domain, Partition partition) {
  if (n < 1)
    throw ConfigError("structured mesh needs n >= 1");
  if (partition == Partition::Quadrant && n % 2 != 0)
    throw ConfigError("quadrant partition needs even n so interfaces align "
                      "with mesh lines; got n = " + std::to_string(n));
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw ConfigError("structured mesh domain must have positive extent");

  Mesh mesh;
  mesh.diagonal_rule = "alternate";
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;
  mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(domain.xmin + i * dx, domain.ymin + j * dy);

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  const double cx = 0.5 * (domain.xmin + domain.xmax);
  const double cy = 0.5 * (domain.ymin + domain.ymax);
  mesh.triangles.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p00 = vid(i, j), p10 = vid(i + 1, j);
      const int p01 = vid(i, j + 1), p11 = vid(i + 1, j + 1);
      Triangle t1, t2;
      if ((i + j) % 2 == 0) {
        t1.v = {p00, p10, p11};
        t2.v = {p00, p11, p01};
      } else {
        t1.v = {p00, p10, p01};
        t2.v = {p10, p11, p01};
      }
      for (Triangle* t : {&t1, &t2}) {
        if (partition == Partition::Quadrant) {
          const Vec2 c = (mesh.vertices[t->v[0]] + mesh.vertices[t->v[1]] +
                          mesh.vertices[t->v[2]]) /
                         3.0;
          const bool east = c.x() > cx, north = c.y() > cy;
          t->subdomain = north ? (east ? 3 : 4) : (east ? 2 : 1);
        }
        mesh.triangles.push_back(*t);
      }
    }
  }
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh fine;
  fine.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end())
      return it->second;
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t.v[0], t.v[1]);
    const int m12 = mid(t.v[1], t.v[2]);
    const int m20 = mid(t.v[2], t.v[0]);
    for (const auto& child : {std::array<int, 3>{t.v[0], m01, m20},
                              std::array<int, 3>{m01, t.v[1], m12},
                              std::array<int, 3>{m20, m12, t.v[2]},
                              std::array<int, 3>{m01, m12, m20}}) {
      Triangle c;
      c.v = child;
      c.subdomain = t.subdomain;
      fine.triangles.push_back(c);
    }
  }
  for (const auto& o : mesh.boundary_overrides) {
    const int m = mid(o.a, o.b);
    fine.boundary_overrides.push_back({o.a, m, o.kind});
    fine.boundary_overrides.push_back({m, o.b, o.kind});
  }
  return fine;
}

void validate(const Mesh& mesh, double tol) {
  const int nv = mesh.num_vertices();
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.triangles[e].v[c];
      if (v < 0 || v >= nv)
        throw TopologyError("triangle " + std::to_string(e) +
                            " references vertex " + std::to_string(v) +
                            " outside [0, " + std::to_string(nv) + ")");
    }
    if (mesh.area(e) <= 0.0)
      throw TopologyError("triangle " + std::to_string(e) +
                          " is degenerate or clockwise (area " +
                          std::to_string(mesh.area(e)) + ")");
  }
  // duplicate vertices break conformity detection via vertex ids
  std::vector<int> order(nv);
  for (int i = 0; i < nv; ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mesh.vertices[a].x() != mesh.vertices[b].x())
      return mesh.vertices[a].x() < mesh.vertices[b].x();
    return mesh.vertices[a].y() < mesh.vertices[b].y();
  });
  for (int i = 0; i + 1 < nv; ++i) {
    const Vec2 d = mesh.vertices[order[i]] - mesh.vertices[order[i + 1]];
    if (d.norm() <= tol)
      throw TopologyError("vertices " + std::to_string(order[i]) + " and " +
                          std::to_string(order[i + 1]) + " coincide");
  }
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c)
      ++count[std::minmax(t.v[c], t.v[(c + 1) % 3])];
  for (const auto& [edge, mult] : count)
    if (mult > 2)
      throw TopologyError("edge {" + std::to_string(edge.first) + ", " +
                          std::to_string(edge.second) + "} is shared by " +
                          std::to_string(mult) + " triangles");
}

Skeleton build_skeleton(const Mesh& mesh) {
  Skeleton skel;
  skel.element_faces.assign(mesh.triangles.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, int> index;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int le = 0; le < 3; ++le) {
      const int a = t.v[le], b = t.v[(le + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        Face f;
        f.a = a;
        f.b = b;
        f.left = e;
        f.left_local = le;
        const Vec2 d = mesh.vertices[b] - mesh.vertices[a];
        f.length = d.norm();
        f.normal = Vec2(d.y(), -d.x()) / f.length;
        index.emplace(key, static_cast<int>(skel.faces.size()));
        skel.element_faces[e][le] = static_cast<int>(skel.faces.size());
        skel.faces.push_back(f);
      } else {
        Face& f = skel.faces[it->second];
        if (f.right >= 0)
          throw TopologyError("edge {" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) +
                              "} is shared by more than two triangles");
        f.right = e;
        f.right_local = le;
        skel.element_faces[e][le] = it->second;
      }
    }
  }
  for (const auto& o : mesh.boundary_overrides) {
    const auto it = index.find(std::minmax(o.a, o.b));
    if (it == index.end() || !skel.faces[it->second].is_boundary())
      throw TopologyError("boundary override names edge {" +
                          std::to_string(o.a) + ", " + std::to_string(o.b) +
                          "} which is not a boundary edge");
    skel.faces[it->second].marker = o.kind;
  }
  for (int f = 0; f < static_cast<int>(skel.faces.size()); ++f)
    (skel.faces[f].is_boundary() ? skel.boundary : skel.interior).push_back(f);
  return skel;
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw ParseError("mesh line " + std::to_string(line) + ": " + what);
}

} // namespace

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  std::string line;
  int lineno = 0;

  const auto next_line = [&](bool required) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos)
        return true;
    }
    if (required)
      parse_fail(lineno + 1, "unexpected end of file");
    return false;
  };

  next_line(true);
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "UIPDG-MESH" || version != 1)
      parse_fail(lineno, "expected header 'UIPDG-MESH 1'");
  }
  next_line(true);
  int nv = 0, nt = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt) || nv < 3 || nt < 1)
      parse_fail(lineno, "expected '<num_vertices> <num_triangles>'");
  }
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    next_line(true);
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y))
      parse_fail(lineno, "expected vertex 'x y'");
    mesh.vertices.emplace_back(x, y);
  }
  mesh.triangles.reserve(nt);
  for (int i = 0; i < nt; ++i) {
    next_line(true);
    std::istringstream ss(line);
    Triangle t;
    if (!(ss >> t.v[0] >> t.v[1] >> t.v[2] >> t.subdomain))
      parse_fail(lineno, "expected triangle 'v0 v1 v2 subdomain'");
    for (int c = 0; c < 3; ++c)
      if (t.v[c] < 0 || t.v[c] >= nv)
        parse_fail(lineno, "vertex id " + std::to_string(t.v[c]) +
                               " outside [0, " + std::to_string(nv) + ")");
    mesh.triangles.push_back(t);
  }
  while (next_line(false)) {
    std::istringstream ss(line);
    std::string tag, marker;
    BoundaryOverride o;
    if (!(ss >> tag >> o.a >> o.b >> marker) || tag != "B" ||
        (marker != "D" && marker != "N"))
      parse_fail(lineno, "expected boundary override 'B vA vB D|N'");
    if (o.a < 0 || o.a >= nv || o.b < 0 || o.b >= nv)
      parse_fail(lineno, "boundary override vertex id outside [0, " +
                             std::to_string(nv) + ")");
    o.kind = marker == "D" ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
    mesh.boundary_overrides.push_back(o);
  }
  validate(mesh);
  return mesh;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "UIPDG-MESH 1\n";
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  char buf[64];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.subdomain
        << '\n';
  for (const auto& o : mesh.boundary_overrides)
    out << "B " << o.a << ' ' << o.b << ' '
        << (o.kind == BoundaryKind::Dirichlet ? 'D' : 'N') << '\n';
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out)
    throw Error("failed writing mesh to '" + path + "'");
}

} // namespace uipdg
