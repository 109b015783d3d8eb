// Global numbering of internal-face unknowns, assembly of the statically
// condensed system, solves, element-unknown recovery and error measurement.
// Homogeneous Dirichlet conditions are imposed strongly: boundary faces carry
// no unknowns.

#ifndef HHO2D_ASSEMBLY_HPP
#define HHO2D_ASSEMBLY_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hho2d/local_operators.hpp"
#include "hho2d/mesh.hpp"

namespace hho2d {

struct DofMap {
  std::vector<int> face_offset;  ///< per face: global offset, -1 on boundary faces
  int block = 1;                 ///< k+1 unknowns per internal face
  int n_dofs = 0;
};

DofMap build_dof_map(const PolyMesh& mesh, int k);

struct CondensedSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  DofMap dofmap;
  LocalSpace space;
  StabilizationVariant variant = StabilizationVariant::Main;
  FaceBasisMode face_mode = FaceBasisMode::Orthonormal;
};

/// Uncondensed system over all element and internal-face dofs; element blocks
/// are numbered first, then face dofs with the condensed offsets shifted.
struct FullSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  DofMap dofmap;
  std::vector<int> element_offset;
  int n_element_dofs = 0;
};

/// Builds every element pack; element work runs in parallel over `threads`
/// workers (0 = hardware), results are deterministic regardless of the count.
std::vector<LocalOperators> build_element_operators(
    const PolyMesh& mesh, const MeshMetrics& metrics, const LocalSpace& space,
    StabilizationVariant variant, const ScalarField& source = nullptr,
    FaceBasisMode face_mode = FaceBasisMode::Orthonormal, unsigned threads = 1);

/// Scatters the per-element Schur blocks. Throws EmptySystemError when the
/// mesh has no internal face. The scatter order is fixed by (element, block)
/// so identical inputs produce bit-identical matrices.
CondensedSystem assemble_condensed(const PolyMesh& mesh,
                                   const std::vector<LocalOperators>& ops);

FullSystem assemble_full(const PolyMesh& mesh, const std::vector<LocalOperators>& ops);

/// Direct symmetric solve: dense LDLT for n <= dense_threshold, sparse
/// simplicial LDLT above. Verifies the residual |Au - b| <= 1e-10 |b|.
Eigen::VectorXd solve(const CondensedSystem& system, int dense_threshold = 2000);

/// Same contract for the uncondensed system (test oracle path).
Eigen::VectorXd solve_full(const FullSystem& system);

struct DiscreteSolution {
  Eigen::VectorXd face_coefficients;                    ///< condensed unknowns
  std::vector<Eigen::VectorXd> element_coefficients;    ///< u_T per element
  std::vector<Eigen::VectorXd> reconstruction_coefficients;  ///< p_h u, degree k+1
};

/// Recovers element unknowns via u_T = S_T u_dT + g_T.
DiscreteSolution recover(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                         const DofMap& dofmap, const Eigen::VectorXd& face_solution);

/// Local dof vector of a solved state on one element (boundary faces are 0).
Eigen::VectorXd local_dofs(const PolyMesh& mesh, const LocalOperators& ops,
                           const DofMap& dofmap, const Eigen::VectorXd& face_solution,
                           const Eigen::VectorXd& element_coefficients);

/// Discrete energy norm of u_h - I_h u for an analytic exact solution.
double energy_error(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                    const DofMap& dofmap, const DiscreteSolution& solution,
                    const ScalarField& exact);

/// Matrix Market coordinate export (symmetric storage, lower triangle).
void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double>& A);

/// CSV dump `face,dof,coefficient` of the condensed solution.
void write_solution_csv(std::ostream& out, const DofMap& dofmap,
                        const Eigen::VectorXd& face_solution);

}  // namespace hho2d

#endif
