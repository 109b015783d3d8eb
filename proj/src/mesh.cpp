#include "hho2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace hho2d {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Orientation of c relative to the directed segment a->b.
int orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
           double tol) {
  double d = cross2(b - a, c - a);
  if (d > tol) return 1;
  if (d < -tol) return -1;
  return 0;
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
}

// Proper or improper intersection of segments [a,b] and [c,d].
bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d, double tol) {
  int o1 = orient(a, b, c, tol);
  int o2 = orient(a, b, d, tol);
  int o3 = orient(c, d, a, tol);
  int o4 = orient(c, d, b, tol);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Self-intersection scan over non-adjacent edge pairs, O(m^2).
bool loop_self_intersects(const std::vector<Eigen::Vector2d>& pts, double scale) {
  const int m = static_cast<int>(pts.size());
  const double tol = 1e-14 * scale * scale;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      // Skip pairs sharing a vertex (consecutive edges, incl. wrap-around).
      if (j == i || j == (i + 1) % m || (j + 1) % m == i) continue;
      if (segments_intersect(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m], tol))
        return true;
    }
  }
  return false;
}

std::vector<Eigen::Vector2d> loop_points(const std::vector<Eigen::Vector2d>& vertices,
                                         const std::vector<int>& loop) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(loop.size());
  for (int v : loop) pts.push_back(vertices[v]);
  return pts;
}

// Distance from p to segment [a,b].
double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  Eigen::Vector2d ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Sampled inscribed-circle radius; diagnostic only.
double inradius_estimate(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int grid = 20;
  double best = 0.0;
  const int m = static_cast<int>(pts.size());
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      Eigen::Vector2d p(lo.x() + (hi.x() - lo.x()) * i / grid,
                        lo.y() + (hi.y() - lo.y()) * j / grid);
      if (!point_in_polygon(p, pts)) continue;
      double d = std::numeric_limits<double>::max();
      for (int e = 0; e < m; ++e) d = std::min(d, point_segment_distance(p, pts[e], pts[(e + 1) % m]));
      best = std::max(best, d);
    }
  }
  return best;
}

}  // namespace

double polygon_signed_area(const std::vector<Eigen::Vector2d>& loop) {
  double a = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) a += cross2(loop[i], loop[(i + 1) % m]);
  return 0.5 * a;
}

double polygon_diameter(const std::vector<Eigen::Vector2d>& loop) {
  double d = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) d = std::max(d, (loop[i] - loop[j]).norm());
  return d;
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& loop) {
  bool inside = false;
  const int m = static_cast<int>(loop.size());
  for (int i = 0, j = m - 1; i < m; j = i++) {
    const Eigen::Vector2d& a = loop[i];
    const Eigen::Vector2d& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

Eigen::Vector2d PolyMesh::outward_normal(int f, int element) const {
  int sign = 0;
  const auto& efs = element_faces[element];
  for (std::size_t i = 0; i < efs.size(); ++i) {
    if (efs[i] == f) {
      sign = element_face_signs[element][i];
      break;
    }
  }
  if (sign == 0) throw MeshError("outward_normal: face not incident to element");
  Eigen::Vector2d t = face_point(f, 1) - face_point(f, 0);
  Eigen::Vector2d n(t.y(), -t.x());  // right-hand normal of a CCW traversal
  return sign * n.normalized();
}

PolyMesh build_mesh(std::vector<Eigen::Vector2d> vertices,
                    std::vector<std::vector<int>> cells) {
  PolyMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.elements = std::move(cells);

  const int nv = mesh.n_vertices();
  std::vector<char> referenced(nv, 0);

  double total_area = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    auto& loop = mesh.elements[e];
    if (loop.size() < 3)
      throw MeshError("degenerate cell " + std::to_string(e) + ": fewer than 3 vertices");
    for (int v : loop) {
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(e) + " references invalid vertex");
      referenced[v] = 1;
    }
    std::vector<Eigen::Vector2d> pts = loop_points(mesh.vertices, loop);
    double diam = polygon_diameter(pts);
    double area = polygon_signed_area(pts);
    if (area < 0.0) {  // normalize to CCW
      std::reverse(loop.begin(), loop.end());
      std::reverse(pts.begin(), pts.end());
      area = -area;
    }
    if (diam <= 0.0 || area <= 1e-14 * diam * diam)
      throw MeshError("degenerate cell " + std::to_string(e) + ": zero area");
    for (std::size_t i = 0; i < loop.size(); ++i) {
      double len = (pts[i] - pts[(i + 1) % pts.size()]).norm();
      if (len <= 1e-14 * diam)
        throw MeshError("degenerate face in cell " + std::to_string(e));
    }
    if (loop_self_intersects(pts, diam))
      throw MeshError("cell " + std::to_string(e) + " is self-intersecting");
    total_area += area;
  }

  for (int v = 0; v < nv; ++v)
    if (!referenced[v]) mesh.dangling_vertices.push_back(v);

  // Deduplicate faces by unordered vertex pair; record traversal signs.
  std::map<std::pair<int, int>, int> face_index;
  mesh.element_faces.resize(mesh.n_elements());
  mesh.element_face_signs.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& loop = mesh.elements[e];
    const int m = static_cast<int>(loop.size());
    for (int i = 0; i < m; ++i) {
      int a = loop[i];
      int b = loop[(i + 1) % m];
      std::pair<int, int> key = std::minmax(a, b);
      auto it = face_index.find(key);
      if (it == face_index.end()) {
        int f = mesh.n_faces();
        face_index.emplace(key, f);
        mesh.faces.push_back({a, b});
        mesh.face_elements.push_back({e, -1});
        mesh.element_faces[e].push_back(f);
        mesh.element_face_signs[e].push_back(+1);
      } else {
        int f = it->second;
        if (mesh.face_elements[f][1] >= 0)
          throw MeshError("non-manifold face between vertices " + std::to_string(a) +
                          " and " + std::to_string(b) + " (three incident elements)");
        if (mesh.face_elements[f][0] == e)
          throw MeshError("cell " + std::to_string(e) + " traverses a face twice");
        // Two CCW cells must traverse a shared face in opposite directions.
        if (mesh.faces[f][0] == a)
          throw MeshError("inconsistent orientation across face " + std::to_string(f));
        mesh.face_elements[f][1] = e;
        mesh.element_faces[e].push_back(f);
        mesh.element_face_signs[e].push_back(-1);
      }
    }
  }

  double boundary_area = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.is_boundary_face(f)) {
      mesh.boundary_faces.push_back(f);
      // Stored order is the traversal direction of the unique incident cell,
      // so the boundary loop is CCW around the domain.
      boundary_area += 0.5 * cross2(mesh.face_point(f, 0), mesh.face_point(f, 1));
    } else {
      mesh.internal_faces.push_back(f);
    }
  }
  if (std::abs(total_area - boundary_area) > 1e-10 * std::abs(boundary_area))
    throw MeshError("element areas do not tile the domain enclosed by the boundary");

  return mesh;
}

MeshMetrics compute_metrics(const PolyMesh& mesh) {
  MeshMetrics m;
  m.element_diameter.resize(mesh.n_elements());
  m.element_area.resize(mesh.n_elements());
  m.element_perimeter.resize(mesh.n_elements());
  m.face_diameter.resize(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) m.face_diameter[f] = mesh.face_length(f);

  m.h_min = std::numeric_limits<double>::max();
  m.regularity_estimate = std::numeric_limits<double>::max();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    std::vector<Eigen::Vector2d> pts = loop_points(mesh.vertices, mesh.elements[e]);
    m.element_diameter[e] = polygon_diameter(pts);
    m.element_area[e] = polygon_signed_area(pts);
    double per = 0.0;
    for (int f : mesh.element_faces[e]) per += m.face_diameter[f];
    m.element_perimeter[e] = per;
    m.h_max = std::max(m.h_max, m.element_diameter[e]);
    m.h_min = std::min(m.h_min, m.element_diameter[e]);
    m.regularity_estimate =
        std::min(m.regularity_estimate, inradius_estimate(pts) / m.element_diameter[e]);
  }
  return m;
}

CharacteristicLengths characteristic_lengths(const PolyMesh& mesh,
                                             const MeshMetrics& metrics) {
  if (mesh.internal_faces.empty())
    throw EmptySystemError("characteristic_lengths: mesh has no internal face");
  double hmin = std::numeric_limits<double>::max();
  double inv_hmax = 0.0;
  for (int f : mesh.internal_faces) {
    double hp = metrics.element_diameter[mesh.face_elements[f][0]];
    double hm = metrics.element_diameter[mesh.face_elements[f][1]];
    hmin = std::min(hmin, hp + hm);
    inv_hmax = std::max(inv_hmax, 1.0 / hp + 1.0 / hm);
  }
  return {hmin, 1.0 / inv_hmax};
}

// --------------------------------------------------------------------------
//   POLYMESH2D text I/O
// --------------------------------------------------------------------------

void write_polymesh(std::ostream& out, const PolyMesh& mesh) {
  out << "POLYMESH2D " << mesh.n_vertices() << " " << mesh.n_elements() << "\n";
  char buf[64];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  for (const auto& loop : mesh.elements) {
    out << loop.size();
    for (int v : loop) out << " " << v;
    out << "\n";
  }
}

PolyMesh read_polymesh(std::istream& in) {
  std::string magic;
  int nv = 0, nc = 0;
  if (!(in >> magic >> nv >> nc) || magic != "POLYMESH2D")
    throw MeshError("read_polymesh: bad header");
  std::vector<Eigen::Vector2d> vertices(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> vertices[i].x() >> vertices[i].y()))
      throw MeshError("read_polymesh: truncated vertex list");
  std::vector<std::vector<int>> cells(nc);
  for (int c = 0; c < nc; ++c) {
    int m = 0;
    if (!(in >> m) || m < 3) throw MeshError("read_polymesh: bad cell size");
    cells[c].resize(m);
    for (int i = 0; i < m; ++i)
      if (!(in >> cells[c][i])) throw MeshError("read_polymesh: truncated cell list");
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

void write_polymesh_file(const std::string& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open " + path + " for writing");
  write_polymesh(out, mesh);
}

PolyMesh read_polymesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  return read_polymesh(in);
}

}  // namespace hho2d
