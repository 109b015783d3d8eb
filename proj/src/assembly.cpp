#include "hho2d/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>

#include "hho2d/common.hpp"

namespace hho2d {

DofMap build_dof_map(const PolyMesh& mesh, int k) {
  DofMap map;
  map.block = k + 1;
  map.face_offset.assign(mesh.n_faces(), -1);
  int offset = 0;
  for (int f : mesh.internal_faces) {
    map.face_offset[f] = offset;
    offset += map.block;
  }
  map.n_dofs = offset;
  return map;
}

std::vector<LocalOperators> build_element_operators(const PolyMesh& mesh,
                                                    const MeshMetrics& metrics,
                                                    const LocalSpace& space,
                                                    StabilizationVariant variant,
                                                    const ScalarField& source,
                                                    FaceBasisMode face_mode,
                                                    unsigned threads) {
  check_admissible(space, variant);
  std::vector<LocalOperators> ops(mesh.n_elements());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(mesh.n_elements(), threads, [&](std::size_t e) {
    try {
      ops[e] = build_local_operators(mesh, metrics, static_cast<int>(e), space, variant,
                                     source, face_mode);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return ops;
}

CondensedSystem assemble_condensed(const PolyMesh& mesh,
                                   const std::vector<LocalOperators>& ops) {
  if (ops.empty() || mesh.n_elements() != static_cast<int>(ops.size()))
    throw ConfigError("assemble_condensed: operator packs do not match the mesh");
  const LocalSpace space = ops.front().space;
  const int blk = space.face_dim();

  CondensedSystem sys;
  sys.space = space;
  sys.dofmap = build_dof_map(mesh, space.k);
  if (sys.dofmap.n_dofs == 0)
    throw EmptySystemError("assemble_condensed: no internal faces, empty condensed system");

  sys.rhs = Eigen::VectorXd::Zero(sys.dofmap.n_dofs);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const LocalOperators& op = ops[e];
    const auto& face_ids = mesh.element_faces[e];
    for (int i = 0; i < op.n_faces(); ++i) {
      int gi = sys.dofmap.face_offset[face_ids[i]];
      int li = i * blk;
      if (gi < 0) continue;  // boundary face: unknowns eliminated
      sys.rhs.segment(gi, blk) += op.face_load.segment(li, blk);
      for (int j = 0; j < op.n_faces(); ++j) {
        int gj = sys.dofmap.face_offset[face_ids[j]];
        if (gj < 0) continue;
        int lj = j * blk;
        for (int a = 0; a < blk; ++a)
          for (int b = 0; b < blk; ++b)
            triplets.emplace_back(gi + a, gj + b, op.schur(li + a, lj + b));
      }
    }
  }
  sys.matrix.resize(sys.dofmap.n_dofs, sys.dofmap.n_dofs);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

FullSystem assemble_full(const PolyMesh& mesh, const std::vector<LocalOperators>& ops) {
  if (ops.empty() || mesh.n_elements() != static_cast<int>(ops.size()))
    throw ConfigError("assemble_full: operator packs do not match the mesh");
  const LocalSpace space = ops.front().space;
  const int blk = space.face_dim();

  FullSystem sys;
  sys.dofmap = build_dof_map(mesh, space.k);
  sys.element_offset.resize(mesh.n_elements());
  int offset = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    sys.element_offset[e] = offset;
    offset += ops[e].n_elem;
  }
  sys.n_element_dofs = offset;
  const int n_total = offset + sys.dofmap.n_dofs;

  auto global_index = [&](int e, int local) -> int {
    const LocalOperators& op = ops[e];
    if (local < op.n_elem) return sys.element_offset[e] + local;
    int i = (local - op.n_elem) / blk;
    int a = (local - op.n_elem) % blk;
    int f = mesh.element_faces[e][i];
    int g = sys.dofmap.face_offset[f];
    return g < 0 ? -1 : sys.n_element_dofs + g + a;
  };

  sys.rhs = Eigen::VectorXd::Zero(n_total);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const LocalOperators& op = ops[e];
    for (int r = 0; r < op.n_local; ++r) {
      int gr = global_index(e, r);
      if (gr < 0) continue;
      for (int c = 0; c < op.n_local; ++c) {
        int gc = global_index(e, c);
        if (gc < 0) continue;
        triplets.emplace_back(gr, gc, op.bilinear(r, c));
      }
    }
    sys.rhs.segment(sys.element_offset[e], op.n_elem) += op.elem_load;
  }
  sys.matrix.resize(n_total, n_total);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace {

Eigen::VectorXd symmetric_solve(const Eigen::SparseMatrix<double>& A,
                                const Eigen::VectorXd& b, int dense_threshold,
                                const char* what) {
  Eigen::VectorXd u;
  if (A.rows() <= dense_threshold) {
    Eigen::MatrixXd dense(A);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(dense);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError(std::string(what) + ": dense factorization failed");
    u = ldlt.solve(b);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError(std::string(what) + ": sparse factorization failed");
    u = ldlt.solve(b);
  }
  double res = (A * u - b).norm();
  double ref = b.norm();
  if (ref > 0.0 && res > 1e-10 * ref)
    throw NumericalError(std::string(what) + ": residual " + std::to_string(res / ref) +
                         " exceeds 1e-10 (numerically singular system?)");
  return u;
}

}  // namespace

Eigen::VectorXd solve(const CondensedSystem& system, int dense_threshold) {
  if (system.dofmap.n_dofs < 1) throw EmptySystemError("solve: empty condensed system");
  return symmetric_solve(system.matrix, system.rhs, dense_threshold, "condensed solve");
}

Eigen::VectorXd solve_full(const FullSystem& system) {
  return symmetric_solve(system.matrix, system.rhs, 0, "full solve");
}

Eigen::VectorXd local_dofs(const PolyMesh& mesh, const LocalOperators& ops,
                           const DofMap& dofmap, const Eigen::VectorXd& face_solution,
                           const Eigen::VectorXd& element_coefficients) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ops.n_local);
  v.head(ops.n_elem) = element_coefficients;
  const int blk = ops.space.face_dim();
  const auto& face_ids = mesh.element_faces[ops.element];
  for (int i = 0; i < ops.n_faces(); ++i) {
    int g = dofmap.face_offset[face_ids[i]];
    if (g >= 0) v.segment(ops.face_offset(i), blk) = face_solution.segment(g, blk);
  }
  return v;
}

DiscreteSolution recover(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                         const DofMap& dofmap, const Eigen::VectorXd& face_solution) {
  DiscreteSolution sol;
  sol.face_coefficients = face_solution;
  sol.element_coefficients.resize(mesh.n_elements());
  sol.reconstruction_coefficients.resize(mesh.n_elements());
  const int blk = dofmap.block;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const LocalOperators& op = ops[e];
    Eigen::VectorXd u_dT = Eigen::VectorXd::Zero(op.n_face_dofs());
    const auto& face_ids = mesh.element_faces[e];
    for (int i = 0; i < op.n_faces(); ++i) {
      int g = dofmap.face_offset[face_ids[i]];
      if (g >= 0) u_dT.segment(i * blk, blk) = face_solution.segment(g, blk);
    }
    sol.element_coefficients[e] = op.lift * u_dT + op.g_T;
    Eigen::VectorXd local =
        local_dofs(mesh, op, dofmap, face_solution, sol.element_coefficients[e]);
    sol.reconstruction_coefficients[e] = op.reconstruction * local;
  }
  return sol;
}

double energy_error(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                    const DofMap& dofmap, const DiscreteSolution& solution,
                    const ScalarField& exact) {
  double err2 = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const LocalOperators& op = ops[e];
    Eigen::VectorXd u_loc = local_dofs(mesh, op, dofmap, solution.face_coefficients,
                                       solution.element_coefficients[e]);
    Eigen::VectorXd diff = u_loc - interpolate(op, exact);
    err2 += diff.dot(op.bilinear * diff);
  }
  return std::sqrt(std::max(0.0, err2));
}

void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double>& A) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t nnz = 0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  out << A.rows() << " " << A.cols() << " " << nnz << "\n";
  char buf[96];
  for (int c = 0; c < A.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) {
      if (it.row() < it.col()) continue;
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

void write_solution_csv(std::ostream& out, const DofMap& dofmap,
                        const Eigen::VectorXd& face_solution) {
  out << "face,dof,coefficient\n";
  char buf[64];
  for (std::size_t f = 0; f < dofmap.face_offset.size(); ++f) {
    int g = dofmap.face_offset[f];
    if (g < 0) continue;
    for (int a = 0; a < dofmap.block; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", face_solution(g + a));
      out << f << "," << a << "," << buf << "\n";
    }
  }
}

}  // namespace hho2d
