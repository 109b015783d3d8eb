#include "hho2d/mesh_factory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace hho2d {

namespace {

// Cancels opposite directed edges and stitches the remainder into a single
// CCW loop. Returns empty on pinch points or multiple loops.
std::vector<int> stitch_directed_edges(std::vector<std::pair<int, int>> edges) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& e : edges) {
    auto rev = count.find({e.second, e.first});
    if (rev != count.end() && rev->second > 0) {
      if (--rev->second == 0) count.erase(rev);
    } else {
      ++count[e];
    }
  }
  std::map<int, std::vector<int>> next;
  std::size_t n_edges = 0;
  for (const auto& [e, c] : count) {
    if (c > 1) return {};  // duplicated directed edge: invalid input
    next[e.first].push_back(e.second);
    ++n_edges;
  }
  if (n_edges < 3) return {};
  for (const auto& [u, vs] : next)
    if (vs.size() != 1) return {};  // pinch vertex: union not simply connected

  int start = next.begin()->first;
  std::vector<int> loop;
  int u = start;
  do {
    loop.push_back(u);
    u = next[u].front();
    if (loop.size() > n_edges) return {};
  } while (u != start);
  if (loop.size() != n_edges) return {};  // leftover edges: hole or second loop
  return loop;
}

double shared_face_length(const PolyMesh& mesh, int a, int b, bool longest_single) {
  double total = 0.0, longest = 0.0;
  for (int f : mesh.element_faces[a]) {
    const auto& fe = mesh.face_elements[f];
    if ((fe[0] == a && fe[1] == b) || (fe[0] == b && fe[1] == a)) {
      double len = mesh.face_length(f);
      total += len;
      longest = std::max(longest, len);
    }
  }
  return longest_single ? longest : total;
}

}  // namespace

PolyMesh build_from_loops(const std::vector<Eigen::Vector2d>& vertices,
                          std::vector<std::vector<int>> loops) {
  std::vector<int> remap(vertices.size(), -1);
  std::vector<char> used(vertices.size(), 0);
  for (const auto& loop : loops)
    for (int v : loop) used[v] = 1;
  std::vector<Eigen::Vector2d> compact;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (used[v]) {
      remap[v] = static_cast<int>(compact.size());
      compact.push_back(vertices[v]);
    }
  }
  for (auto& loop : loops)
    for (int& v : loop) v = remap[v];
  return build_mesh(std::move(compact), std::move(loops));
}

std::vector<int> merged_element_loop(const PolyMesh& mesh,
                                     const std::vector<int>& elements) {
  std::vector<std::pair<int, int>> edges;
  for (int e : elements) {
    const auto& fs = mesh.element_faces[e];
    const auto& signs = mesh.element_face_signs[e];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& f = mesh.faces[fs[i]];
      if (signs[i] > 0)
        edges.emplace_back(f[0], f[1]);
      else
        edges.emplace_back(f[1], f[0]);
    }
  }
  return stitch_directed_edges(std::move(edges));
}

PolyMesh cartesian_mesh(int n) {
  if (n < 1) throw ConfigError("cartesian_mesh: n must be >= 1");
  std::vector<Eigen::Vector2d> vertices((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices[vid(i, j)] = Eigen::Vector2d(static_cast<double>(i) / n,
                                            static_cast<double>(j) / n);
  std::vector<std::vector<int>> loops;
  loops.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return build_from_loops(vertices, std::move(loops));
}

PolyMesh triangular_mesh(int n) {
  if (n < 1) throw ConfigError("triangular_mesh: n must be >= 1");
  std::vector<Eigen::Vector2d> vertices((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices[vid(i, j)] = Eigen::Vector2d(static_cast<double>(i) / n,
                                            static_cast<double>(j) / n);
  std::vector<std::vector<int>> loops;
  loops.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      loops.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return build_from_loops(vertices, std::move(loops));
}

PolyMesh coarsen(const PolyMesh& mesh, int levels) {
  if (levels < 0) throw ConfigError("coarsen: negative level count");
  PolyMesh current = mesh;
  for (int level = 0; level < levels; ++level) {
    std::vector<char> taken(current.n_elements(), 0);
    std::vector<std::vector<int>> loops;
    for (int e = 0; e < current.n_elements(); ++e) {
      if (taken[e]) continue;
      taken[e] = 1;
      // Candidate partners ranked by total shared interface length.
      std::vector<std::pair<double, int>> candidates;
      for (int f : current.element_faces[e]) {
        const auto& fe = current.face_elements[f];
        int nb = fe[0] == e ? fe[1] : fe[0];
        if (nb < 0 || taken[nb]) continue;
        candidates.emplace_back(shared_face_length(current, e, nb, false), nb);
      }
      std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      bool merged = false;
      for (const auto& [len, nb] : candidates) {
        std::vector<int> loop = merged_element_loop(current, {e, nb});
        if (loop.empty()) continue;  // union not simply connected: re-seed
        taken[nb] = 1;
        loops.push_back(std::move(loop));
        merged = true;
        break;
      }
      if (!merged) loops.push_back(current.elements[e]);
    }
    current = build_from_loops(current.vertices, std::move(loops));
  }
  return current;
}

std::pair<PolyMesh, CutClassification> cut_strip_mesh(int n, double epsilon) {
  if (n < 2) throw ConfigError("cut_strip_mesh: n must be >= 2");
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / n))
    throw ConfigError("cut_strip_mesh: epsilon must lie in (0, 1/n)");
  if (epsilon <= 1e-12 / n)
    throw MeshError("cut_strip_mesh: epsilon below the collinearity tolerance");

  // Column abscissae: full columns plus the cut plane.
  std::vector<double> xs;
  for (int i = 0; i <= n - 2; ++i) xs.push_back(static_cast<double>(i) / n);
  xs.push_back(static_cast<double>(n - 2) / n + epsilon);
  const int ncols = static_cast<int>(xs.size()) - 1;

  std::vector<Eigen::Vector2d> vertices;
  auto vid = [&](int i, int j) { return j * (ncols + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= ncols; ++i)
      vertices.emplace_back(xs[i], static_cast<double>(j) / n);

  std::vector<std::vector<int>> loops;
  CutClassification cls;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < ncols; ++i) {
      loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
      cls.element_is_cut.push_back(i == ncols - 1 ? 1 : 0);
      cls.background_status.push_back(i == ncols - 1 ? CellStatus::Cut
                                                     : CellStatus::Interior);
    }
    cls.background_status.push_back(CellStatus::Exterior);  // clipped-away column
  }
  PolyMesh mesh = build_from_loops(vertices, std::move(loops));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (!cls.element_is_cut[e]) continue;
    std::vector<Eigen::Vector2d> pts;
    for (int v : mesh.elements[e]) pts.push_back(mesh.vertices[v]);
    double diam = polygon_diameter(pts);
    double area = polygon_signed_area(pts);
    double per = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      per += (pts[(i + 1) % pts.size()] - pts[i]).norm();
    cls.cut_cells.push_back({e, diam, area / (per * diam)});
  }
  return {std::move(mesh), std::move(cls)};
}

std::pair<PolyMesh, CutClassification> cut_circle_mesh(int n) {
  if (n < 4) throw ConfigError("cut_circle_mesh: n must be >= 4");
  const int cells = n + 1;  // grid of spacing 2/n over [-1-1/n, 1+1/n]^2
  const double h = 2.0 / n;
  const double origin = -1.0 - 1.0 / n;

  auto corner = [&](int i, int j) {
    return Eigen::Vector2d(origin + h * i, origin + h * j);
  };
  std::vector<double> level((cells + 1) * (cells + 1));
  auto cid = [&](int i, int j) { return j * (cells + 1) + i; };
  for (int j = 0; j <= cells; ++j)
    for (int i = 0; i <= cells; ++i)
      level[cid(i, j)] = corner(i, j).squaredNorm() - 1.0;

  // Shared vertex pool: grid corners plus one cached crossing per grid edge,
  // so adjacent cells agree bit-exactly on the cut points.
  std::vector<Eigen::Vector2d> pool;
  std::map<std::tuple<int, int, int>, int> vertex_id;  // (i, j, kind)
  constexpr int kCorner = 0, kHorizontal = 1, kVertical = 2;
  auto get_corner = [&](int i, int j) {
    auto [it, inserted] = vertex_id.try_emplace({i, j, kCorner}, static_cast<int>(pool.size()));
    if (inserted) pool.push_back(corner(i, j));
    return it->second;
  };
  auto get_crossing = [&](int i, int j, bool horizontal) {
    auto [it, inserted] = vertex_id.try_emplace({i, j, horizontal ? kHorizontal : kVertical},
                                                static_cast<int>(pool.size()));
    if (inserted) {
      double sa = level[cid(i, j)];
      double sb = horizontal ? level[cid(i + 1, j)] : level[cid(i, j + 1)];
      double t = sa / (sa - sb);
      Eigen::Vector2d a = corner(i, j);
      Eigen::Vector2d b = horizontal ? corner(i + 1, j) : corner(i, j + 1);
      pool.push_back(a + t * (b - a));
    }
    return it->second;
  };

  std::vector<std::vector<int>> loops;
  CutClassification cls;
  cls.background_status.assign(cells * cells, CellStatus::Exterior);

  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const int ci[4][2] = {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
      double s[4];
      for (int c = 0; c < 4; ++c) s[c] = level[cid(ci[c][0], ci[c][1])];

      int inside = 0;
      for (double v : s)
        if (v < 0.0) ++inside;
      const int bg = j * cells + i;
      if (inside == 0) continue;  // exterior

      std::vector<int> loop;
      int crossings = 0;
      if (inside == 4) {
        loop = {get_corner(i, j), get_corner(i + 1, j), get_corner(i + 1, j + 1),
                get_corner(i, j + 1)};
      } else {
        for (int c = 0; c < 4; ++c) {
          int cn = (c + 1) % 4;
          if (s[c] < 0.0) loop.push_back(get_corner(ci[c][0], ci[c][1]));
          if ((s[c] < 0.0) != (s[cn] < 0.0)) {
            // Canonical edge of the crossing (lower-left corner + direction).
            int ei = std::min(ci[c][0], ci[cn][0]);
            int ej = std::min(ci[c][1], ci[cn][1]);
            bool horizontal = ci[c][1] == ci[cn][1];
            loop.push_back(get_crossing(ei, ej, horizontal));
            ++crossings;
          }
        }
        if (crossings != 2)
          throw MeshError("cut_circle_mesh: multi-component cut cell (background cell " +
                          std::to_string(bg) + ")");
      }

      std::vector<Eigen::Vector2d> pts;
      for (int v : loop) pts.push_back(pool[v]);
      double area = polygon_signed_area(pts);
      if (area < 1e-14) continue;  // tangential cut: reclassified exterior

      cls.background_status[bg] = inside == 4 ? CellStatus::Interior : CellStatus::Cut;
      cls.element_is_cut.push_back(inside == 4 ? 0 : 1);
      if (inside < 4) {
        double diam = polygon_diameter(pts);
        double per = 0.0;
        for (std::size_t p = 0; p < pts.size(); ++p)
          per += (pts[(p + 1) % pts.size()] - pts[p]).norm();
        cls.cut_cells.push_back(
            {static_cast<int>(loops.size()), diam, area / (per * diam)});
      }
      loops.push_back(std::move(loop));
    }
  }
  if (loops.empty()) throw MeshError("cut_circle_mesh: no active cells");
  return {build_from_loops(pool, std::move(loops)), std::move(cls)};
}

std::pair<PolyMesh, AggregationPlan> aggregate(const PolyMesh& mesh,
                                               const CutClassification& classification,
                                               double eps1, double eps2) {
  if (classification.element_is_cut.size() != static_cast<std::size_t>(mesh.n_elements()))
    throw ConfigError("aggregate: classification does not match the mesh");
  PolyMesh current = mesh;
  std::vector<char> cut = classification.element_is_cut;
  const double h_max = compute_metrics(mesh).h_max;
  const std::size_t initial_cut =
      static_cast<std::size_t>(std::count(cut.begin(), cut.end(), 1));

  AggregationPlan plan;
  while (true) {
    ++plan.iterations;
    MeshMetrics metrics = compute_metrics(current);
    int victim = -1;
    std::string criterion;
    for (int e = 0; e < current.n_elements(); ++e) {
      if (!cut[e]) continue;
      bool sliver = eps1 > 0.0 && metrics.element_area[e] / metrics.element_perimeter[e] <
                                      eps1 * metrics.element_diameter[e];
      bool small = eps2 > 0.0 && metrics.element_diameter[e] < eps2 * h_max;
      if (sliver || small) {
        victim = e;
        criterion = sliver ? "sliver" : "small";
        break;
      }
    }
    if (victim < 0) break;
    if (plan.entries.size() >= initial_cut)
      throw NumericalError("aggregate: merge count exceeded the cut-cell count");

    // Neighbour sharing the longest single face; ties go to the lowest index.
    std::vector<std::pair<double, int>> candidates;
    for (int f : current.element_faces[victim]) {
      const auto& fe = current.face_elements[f];
      int nb = fe[0] == victim ? fe[1] : fe[0];
      if (nb < 0) continue;
      candidates.emplace_back(shared_face_length(current, victim, nb, true), nb);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty())
      throw MeshError("aggregate: ill-posed element " + std::to_string(victim) +
                      " has no neighbour");

    int target = -1;
    std::vector<int> merged;
    double shared = 0.0;
    for (const auto& [len, nb] : candidates) {
      merged = merged_element_loop(current, {victim, nb});
      if (!merged.empty()) {
        target = nb;
        shared = len;
        break;
      }
    }
    if (target < 0)
      throw MeshError("aggregate: no admissible neighbour for element " +
                      std::to_string(victim));
    plan.entries.push_back({victim, target, criterion, shared});

    const int keep = std::min(victim, target);
    const int drop = std::max(victim, target);
    std::vector<std::vector<int>> loops = current.elements;
    loops[keep] = std::move(merged);
    loops.erase(loops.begin() + drop);
    cut[keep] = 1;
    cut.erase(cut.begin() + drop);
    current = build_from_loops(current.vertices, std::move(loops));
  }
  return {std::move(current), std::move(plan)};
}

PolyMesh penta_diagonal_mesh(int n) {
  if (n < 5) throw ConfigError("penta_diagonal_mesh: n must be >= 5");
  std::vector<Eigen::Vector2d> vertices((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices[vid(i, j)] = Eigen::Vector2d(static_cast<double>(i) / n,
                                            static_cast<double>(j) / n);

  std::vector<std::vector<int>> loops;
  auto cell_edges = [&](int i, int j, std::vector<std::pair<int, int>>& edges) {
    edges.emplace_back(vid(i, j), vid(i + 1, j));
    edges.emplace_back(vid(i + 1, j), vid(i + 1, j + 1));
    edges.emplace_back(vid(i + 1, j + 1), vid(i, j + 1));
    edges.emplace_back(vid(i, j + 1), vid(i, j));
  };

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (std::abs(i - j) <= 2)
        loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});

  // The two staircase super-elements keep every grid edge on their boundary.
  for (int side = 0; side < 2; ++side) {
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if ((side == 0 && i - j > 2) || (side == 1 && j - i > 2)) cell_edges(i, j, edges);
    std::vector<int> loop = stitch_directed_edges(std::move(edges));
    if (loop.empty()) throw MeshError("penta_diagonal_mesh: staircase stitch failed");
    loops.push_back(std::move(loop));
  }
  return build_from_loops(vertices, std::move(loops));
}

}  // namespace hho2d
