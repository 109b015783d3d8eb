#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "hho2d/mesh.hpp"
#include "hho2d/mesh_factory.hpp"

using namespace hho2d;

namespace {

PolyMesh unit_square_mesh() {
  return build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

}  // namespace

TEST_CASE("single cell topology") {
  PolyMesh mesh = unit_square_mesh();
  CHECK(mesh.n_elements() == 1);
  CHECK(mesh.n_faces() == 4);
  CHECK(mesh.boundary_faces.size() == 4);
  CHECK(mesh.internal_faces.empty());
}

TEST_CASE("2x2 grid counts") {
  PolyMesh mesh = cartesian_mesh(2);
  CHECK(mesh.n_elements() == 4);
  CHECK(mesh.internal_faces.size() == 4);
  CHECK(mesh.boundary_faces.size() == 8);
}

TEST_CASE("shared diagonal gets opposite normal signs") {
  PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                             {{0, 1, 2}, {0, 2, 3}});
  REQUIRE(mesh.internal_faces.size() == 1);
  int f = mesh.internal_faces[0];
  int e0 = mesh.face_elements[f][0];
  int e1 = mesh.face_elements[f][1];
  Eigen::Vector2d n0 = mesh.outward_normal(f, e0);
  Eigen::Vector2d n1 = mesh.outward_normal(f, e1);
  CHECK((n0 + n1).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("metrics on reference shapes") {
  SUBCASE("unit square") {
    MeshMetrics m = compute_metrics(unit_square_mesh());
    CHECK(m.element_diameter[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(m.element_area[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.element_perimeter[0] == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("right triangle") {
    PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    MeshMetrics m = compute_metrics(mesh);
    CHECK(m.element_diameter[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(m.element_area[0] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("2x2 grid diameters") {
    MeshMetrics m = compute_metrics(cartesian_mesh(2));
    CHECK(m.h_min == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(m.h_max == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  }
  SUBCASE("face diameter never exceeds element diameter") {
    PolyMesh mesh = triangular_mesh(3);
    MeshMetrics m = compute_metrics(mesh);
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int f : mesh.element_faces[e])
        CHECK(m.face_diameter[f] <= m.element_diameter[e] + 1e-14);
  }
}

TEST_CASE("characteristic lengths") {
  SUBCASE("uniform mesh collapses to (2h, h/2)") {
    PolyMesh mesh = cartesian_mesh(2);
    MeshMetrics m = compute_metrics(mesh);
    CharacteristicLengths cl = characteristic_lengths(mesh, m);
    double h = std::sqrt(2.0) / 2;
    CHECK(cl.H_min == doctest::Approx(2 * h).epsilon(1e-14));
    CHECK(cl.H_max == doctest::Approx(h / 2).epsilon(1e-14));
  }
  SUBCASE("single internal face between different diameters") {
    // [0,1]^2 next to [1,3]x[0,1]: diameters sqrt(2) and sqrt(5).
    PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {3, 0}, {3, 1}, {1, 1}, {0, 1}},
                               {{0, 1, 4, 5}, {1, 2, 3, 4}});
    MeshMetrics m = compute_metrics(mesh);
    CharacteristicLengths cl = characteristic_lengths(mesh, m);
    double a = std::sqrt(2.0), b = std::sqrt(5.0);
    CHECK(cl.H_min == doctest::Approx(a + b).epsilon(1e-14));
    CHECK(cl.H_max == doctest::Approx(a * b / (a + b)).epsilon(1e-14));
  }
  SUBCASE("4x4 grid, enumerated") {
    PolyMesh mesh = cartesian_mesh(4);
    CHECK(mesh.internal_faces.size() == 24);
    MeshMetrics m = compute_metrics(mesh);
    CharacteristicLengths cl = characteristic_lengths(mesh, m);
    // All 24 internal faces join elements of diameter sqrt(2)/4.
    CHECK(cl.H_min == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(cl.H_max == doctest::Approx(std::sqrt(2.0) / 8).epsilon(1e-14));
  }
  SUBCASE("no internal faces signals an empty system") {
    PolyMesh mesh = unit_square_mesh();
    MeshMetrics m = compute_metrics(mesh);
    CHECK_THROWS_AS(characteristic_lengths(mesh, m), EmptySystemError);
  }
}

TEST_CASE("characteristic length inequalities across families") {
  for (const PolyMesh& mesh :
       {cartesian_mesh(3), triangular_mesh(4), coarsen(triangular_mesh(4), 2),
        penta_diagonal_mesh(6)}) {
    MeshMetrics m = compute_metrics(mesh);
    CharacteristicLengths cl = characteristic_lengths(mesh, m);
    CHECK(cl.H_min >= m.h_min - 1e-14);
    CHECK(cl.H_max >= m.h_min / 2 - 1e-14);
    for (int f : mesh.internal_faces) {
      double sum = m.element_diameter[mesh.face_elements[f][0]] +
                   m.element_diameter[mesh.face_elements[f][1]];
      CHECK(cl.H_min <= sum + 1e-14);
    }
  }
}

TEST_CASE("incidence maps are mutually consistent") {
  PolyMesh mesh = triangular_mesh(3);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f : mesh.element_faces[e]) {
      bool listed = mesh.face_elements[f][0] == e || mesh.face_elements[f][1] == e;
      CHECK(listed);
    }
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    for (int side = 0; side < 2; ++side) {
      int e = mesh.face_elements[f][side];
      if (e < 0) continue;
      const auto& fs = mesh.element_faces[e];
      CHECK(std::count(fs.begin(), fs.end(), f) == 1);
    }
  }
}

TEST_CASE("builder rejects invalid input") {
  SUBCASE("non-manifold face") {
    CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}},
                               {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}),
                    MeshError);
  }
  SUBCASE("degenerate cell: too few vertices") {
    CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}}, {{0, 1}}), MeshError);
  }
  SUBCASE("degenerate cell: zero area") {
    CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), MeshError);
  }
  SUBCASE("self-intersecting cell") {
    // Crossing edges at (2,2) with nonzero signed area.
    CHECK_THROWS_AS(build_mesh({{0, 0}, {4, 0}, {1, 3}, {3, 3}}, {{0, 1, 2, 3}}),
                    MeshError);
  }
  SUBCASE("dangling vertex is tolerated and reported") {
    PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {5, 5}}, {{0, 1, 2, 3}});
    REQUIRE(mesh.dangling_vertices.size() == 1);
    CHECK(mesh.dangling_vertices[0] == 4);
  }
  SUBCASE("clockwise loops are normalised to CCW") {
    PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{3, 2, 1, 0}});
    std::vector<Eigen::Vector2d> pts;
    for (int v : mesh.elements[0]) pts.push_back(mesh.vertices[v]);
    CHECK(polygon_signed_area(pts) > 0.0);
  }
}

TEST_CASE("POLYMESH2D round-trips bit-exactly") {
  PolyMesh mesh = build_mesh({{1.0 / 3.0, 0},
                              {std::sqrt(2.0), 0.1},
                              {1.2345678901234567, 1.7320508075688772},
                              {0, 1.0000000000000002}},
                             {{0, 1, 2, 3}});
  std::stringstream first;
  write_polymesh(first, mesh);
  PolyMesh reread = read_polymesh(first);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    CHECK(reread.vertices[v].x() == mesh.vertices[v].x());
    CHECK(reread.vertices[v].y() == mesh.vertices[v].y());
  }
  std::stringstream second;
  write_polymesh(second, reread);
  CHECK(first.str() == second.str());
}

TEST_CASE("reader rejects malformed input") {
  std::stringstream bad("POLYMESH1D 1 1\n0 0\n3 0 0 0\n");
  CHECK_THROWS_AS(read_polymesh(bad), MeshError);
}
