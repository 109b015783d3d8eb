// Polygonal mesh data model for d = 2: elements are simple counter-clockwise
// vertex loops, faces are straight segments between two vertices. A side
// subdivided by hanging nodes is stored as several distinct faces.

#ifndef HHO2D_MESH_HPP
#define HHO2D_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hho2d/common.hpp"

namespace hho2d {

/// Polygonal mesh. Immutable after build_mesh; safe to share read-only.
struct PolyMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::vector<int>> elements;  ///< CCW vertex loops
  std::vector<std::array<int, 2>> faces;   ///< vertex index pairs

  /// Incident elements per face; second entry is -1 on boundary faces.
  std::vector<std::array<int, 2>> face_elements;
  /// Per element, face indices in loop order.
  std::vector<std::vector<int>> element_faces;
  /// +1 when the element traverses the face in stored vertex order.
  std::vector<std::vector<int>> element_face_signs;

  std::vector<int> boundary_faces;  ///< sorted face indices on the domain boundary
  std::vector<int> internal_faces;  ///< sorted face indices shared by two elements
  std::vector<int> dangling_vertices;  ///< tolerated, reported for inspection

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  bool is_boundary_face(int f) const { return face_elements[f][1] < 0; }

  /// Endpoints of face f in stored order.
  Eigen::Vector2d face_point(int f, int end) const { return vertices[faces[f][end]]; }

  double face_length(int f) const {
    return (face_point(f, 1) - face_point(f, 0)).norm();
  }

  /// Unit normal to face f pointing out of element T (T must be incident).
  Eigen::Vector2d outward_normal(int f, int element) const;
};

/// Per-entity diameters and measures.
struct MeshMetrics {
  double h_max = 0.0;
  double h_min = 0.0;
  std::vector<double> element_diameter;   ///< h_T, exact max pairwise vertex distance
  std::vector<double> face_diameter;      ///< h_F = face length
  std::vector<double> element_area;       ///< |T|, shoelace
  std::vector<double> element_perimeter;  ///< |dT|, sum of face lengths
  double regularity_estimate = 0.0;  ///< min over elements of inradius/h_T (sampled, diagnostic)
};

/// Characteristic lengths over internal faces: H_min is the minimum of the
/// summed incident-element diameters, H_max the reciprocal of the maximum of
/// summed reciprocals. Boundary faces carry no unknowns and are excluded.
struct CharacteristicLengths {
  double H_min = 0.0;
  double H_max = 0.0;
};

/// Builds the full connectivity from vertex coordinates and CCW cell loops.
/// Faces shared by two cells are deduplicated with opposite traversal signs.
/// Throws MeshError on non-manifold faces, degenerate or self-intersecting
/// cells; dangling vertices are tolerated and reported in the result.
PolyMesh build_mesh(std::vector<Eigen::Vector2d> vertices,
                    std::vector<std::vector<int>> cells);

MeshMetrics compute_metrics(const PolyMesh& mesh);

/// Throws EmptySystemError when the mesh has no internal face.
CharacteristicLengths characteristic_lengths(const PolyMesh& mesh,
                                             const MeshMetrics& metrics);

// --------------------------------------------------------------------------
//   Plain-text POLYMESH2D format
//   header `POLYMESH2D <n_vertices> <n_cells>`, vertex lines `x y`,
//   cell lines `m i1 ... im` (0-based). Coordinates round-trip bit-exactly.
// --------------------------------------------------------------------------

void write_polymesh(std::ostream& out, const PolyMesh& mesh);
PolyMesh read_polymesh(std::istream& in);
void write_polymesh_file(const std::string& path, const PolyMesh& mesh);
PolyMesh read_polymesh_file(const std::string& path);

// Geometry helpers shared with the generators.

/// Signed area of a vertex loop (positive when counter-clockwise).
double polygon_signed_area(const std::vector<Eigen::Vector2d>& loop);

/// Max pairwise distance between loop vertices.
double polygon_diameter(const std::vector<Eigen::Vector2d>& loop);

/// Crossing-number test; points on the boundary may land on either side.
bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& loop);

}  // namespace hho2d

#endif
