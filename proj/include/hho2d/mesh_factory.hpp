// Generators for the experiment mesh families: Cartesian and triangular
// grids, coarsened meshes, cut-strip and cut-circle meshes, the aggregation
// cure for ill-posed cut elements, and penta-diagonal meshes. Merged elements
// always keep the constituent faces toward third elements as distinct faces.

#ifndef HHO2D_MESH_FACTORY_HPP
#define HHO2D_MESH_FACTORY_HPP

#include <string>
#include <utility>
#include <vector>

#include "hho2d/mesh.hpp"

namespace hho2d {

enum class CellStatus { Exterior, Interior, Cut };

/// Classification of background cells against the domain boundary.
struct CutClassification {
  std::vector<CellStatus> background_status;  ///< per background cell
  std::vector<char> element_is_cut;           ///< per active mesh element
  struct CutCell {
    int element = -1;       ///< active mesh element index
    double diameter = 0.0;  ///< h_T of the clipped polygon
    double sliver_ratio = 0.0;  ///< |T| / (|dT| h_T)
  };
  std::vector<CutCell> cut_cells;
};

/// One merge performed by the aggregation algorithm. Indices refer to the
/// mesh state at the time of the merge; the merged element takes the lower
/// of the two slots.
struct AggregationPlan {
  struct Entry {
    int element = -1;
    int target = -1;
    std::string criterion;  ///< "sliver" or "small"
    double shared_face_length = 0.0;
  };
  std::vector<Entry> entries;
  int iterations = 0;  ///< scan passes until the fixed point
};

/// n x n unit squares on (0,1)^2.
PolyMesh cartesian_mesh(int n);

/// Each square of the n x n grid split along the (i,j)->(i+1,j+1) diagonal.
PolyMesh triangular_mesh(int n);

/// One coarsening level greedily pairs face-connected elements by largest
/// shared interface, in element order; `levels` applications. Merged elements
/// keep all original boundary faces as distinct faces.
PolyMesh coarsen(const PolyMesh& mesh, int levels);

/// Cartesian n x n grid on (0,1)^2 clipped against x < (n-2)/n + epsilon:
/// the penultimate column becomes a column of epsilon-wide cut cells, the
/// last column is discarded. Requires 0 < epsilon < 1/n.
std::pair<PolyMesh, CutClassification> cut_strip_mesh(int n, double epsilon);

/// Background grid of spacing 2/n over [-1-1/n, 1+1/n]^2 clipped cell-wise
/// against the piecewise-linear interpolation of x^2 + y^2 - 1. Exterior
/// cells are dropped; cells whose clipped area falls below 1e-14 are
/// reclassified exterior. Multi-component intersections are rejected.
std::pair<PolyMesh, CutClassification> cut_circle_mesh(int n);

/// Merges ill-posed cut elements (|T|/|dT| < eps1 h_T or h_T < eps2 h_max,
/// h_max from the input mesh) into the neighbour sharing the longest face,
/// rescanning until no ill-posed element remains. Setting eps2 = 0 aggregates
/// slivers only. Only cut elements are candidates; aggregates stay candidates.
std::pair<PolyMesh, AggregationPlan> aggregate(const PolyMesh& mesh,
                                               const CutClassification& classification,
                                               double eps1 = 0.05, double eps2 = 0.3);

/// n x n grid where the five central diagonals |i-j| <= 2 stay individual
/// squares and each remaining corner block is merged into one staircase
/// element that keeps every original grid edge as a face. Requires n >= 5.
PolyMesh penta_diagonal_mesh(int n);

/// Builds a mesh from loops over a shared vertex pool, dropping unreferenced
/// vertices. All generators funnel through this so every generated mesh is
/// validated by build_mesh.
PolyMesh build_from_loops(const std::vector<Eigen::Vector2d>& vertices,
                          std::vector<std::vector<int>> loops);

/// Boundary loop of the union of the given elements, traversed CCW with all
/// retained face endpoints; empty when the union is not simply connected.
std::vector<int> merged_element_loop(const PolyMesh& mesh, const std::vector<int>& elements);

}  // namespace hho2d

#endif
