#include "hho2d/local_operators.hpp"

#include <cmath>
#include <string>

namespace hho2d {

const char* to_string(StabilizationVariant v) {
  switch (v) {
    case StabilizationVariant::Main: return "main";
    case StabilizationVariant::KMinusOne: return "kminus1";
    case StabilizationVariant::Boundary: return "boundary";
    case StabilizationVariant::Gradient: return "gradient";
    case StabilizationVariant::Hdg: return "hdg";
  }
  return "?";
}

StabilizationVariant stabilization_from_string(const std::string& name) {
  if (name == "main") return StabilizationVariant::Main;
  if (name == "kminus1") return StabilizationVariant::KMinusOne;
  if (name == "boundary") return StabilizationVariant::Boundary;
  if (name == "gradient") return StabilizationVariant::Gradient;
  if (name == "hdg") return StabilizationVariant::Hdg;
  throw ConfigError("unknown stabilization '" + name + "'");
}

LocalSpace make_local_space(int k, int l) {
  if (k < 0) throw ConfigError("local space: face degree k must be >= 0");
  if (l < 0) throw ConfigError("local space: element degree l must be >= 0");
  if (l < k - 1 || l > k + 1)
    throw ConfigError("local space: element degree l must lie in {k-1, k, k+1}, got k=" +
                      std::to_string(k) + " l=" + std::to_string(l));
  return LocalSpace{k, l};
}

void check_admissible(const LocalSpace& space, StabilizationVariant variant) {
  if (variant == StabilizationVariant::KMinusOne && space.l != space.k - 1)
    throw ConfigError("kminus1 stabilization requires l = k-1 (coercivity fails otherwise)");
  if (variant == StabilizationVariant::Hdg && space.l != space.k + 1)
    throw ConfigError("hdg stabilization requires l = k+1");
}

PolynomialBasis basis_prefix(const PolynomialBasis& basis, int degree) {
  if (degree > basis.degree) throw ConfigError("basis_prefix: degree exceeds basis degree");
  PolynomialBasis p = basis;
  p.degree = degree;
  int dim = basis.on_face ? degree + 1 : (degree + 1) * (degree + 2) / 2;
  p.exponents.resize(dim);
  p.coeff = basis.coeff.topLeftCorner(dim, dim).eval();
  return p;
}

namespace {

// Weighted cross Gram A^T diag(w) B.
Eigen::MatrixXd wgram(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                      const Eigen::MatrixXd& B) {
  return A.transpose() * w.asDiagonal() * B;
}

}  // namespace

Eigen::MatrixXd stabilization_matrix(const LocalOperators& ops, StabilizationVariant variant) {
  check_admissible(ops.space, variant);
  const int n_T = ops.n_elem;
  const double inv_h = 1.0 / ops.h_T;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(ops.n_local, ops.n_local);

  // Boundary penalty shared by main, kminus1 and gradient.
  auto add_face_difference_terms = [&]() {
    for (int i = 0; i < ops.n_faces(); ++i) {
      Eigen::MatrixXd V = ops.psi_F[i] * ops.diff_F[i];  // values of delta_dT on F
      S += inv_h * wgram(V, ops.quad_F[i].weights, V);
    }
  };

  switch (variant) {
    case StabilizationVariant::Main: {
      Eigen::MatrixXd V = ops.phi_T.leftCols(n_T) * ops.diff_T;
      S += inv_h * inv_h * wgram(V, ops.quad_T.weights, V);
      add_face_difference_terms();
      break;
    }
    case StabilizationVariant::KMinusOne: {
      add_face_difference_terms();
      break;
    }
    case StabilizationVariant::Gradient: {
      Eigen::MatrixXd Vx = ops.dphi_x.leftCols(n_T) * ops.diff_T;
      Eigen::MatrixXd Vy = ops.dphi_y.leftCols(n_T) * ops.diff_T;
      S += wgram(Vx, ops.quad_T.weights, Vx) + wgram(Vy, ops.quad_T.weights, Vy);
      add_face_difference_terms();
      break;
    }
    case StabilizationVariant::Boundary: {
      for (int i = 0; i < ops.n_faces(); ++i) {
        Eigen::MatrixXd V =
            ops.psi_F[i] * ops.diff_F[i] - ops.phi_TF[i].leftCols(n_T) * ops.diff_T;
        S += inv_h * wgram(V, ops.quad_F[i].weights, V);
      }
      break;
    }
    case StabilizationVariant::Hdg: {
      const int n_F = ops.space.face_dim();
      for (int i = 0; i < ops.n_faces(); ++i) {
        // pi_F^k(v_F - v_T) in face coefficients.
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n_F, ops.n_local);
        H.middleCols(ops.face_offset(i), n_F).setIdentity();
        Eigen::MatrixXd C = wgram(ops.psi_F[i], ops.quad_F[i].weights,
                                  ops.phi_TF[i].leftCols(n_T));
        if (ops.basis_F[i].orthonormal) {
          H.leftCols(n_T) -= C;
        } else {
          Eigen::MatrixXd M = wgram(ops.psi_F[i], ops.quad_F[i].weights, ops.psi_F[i]);
          H.leftCols(n_T) -= M.ldlt().solve(C);
        }
        Eigen::MatrixXd V = ops.psi_F[i] * H;
        S += inv_h * wgram(V, ops.quad_F[i].weights, V);
      }
      break;
    }
  }
  return S;
}

LocalOperators build_local_operators(const PolyMesh& mesh, const MeshMetrics& metrics,
                                     int element, const LocalSpace& space,
                                     StabilizationVariant variant, const ScalarField& source,
                                     FaceBasisMode face_mode) {
  check_admissible(space, variant);
  LocalOperators ops;
  ops.space = space;
  ops.element = element;
  ops.h_T = metrics.element_diameter[element];
  ops.area = metrics.element_area[element];
  ops.n_elem = space.element_dim();

  const auto& loop = mesh.elements[element];
  const auto& face_ids = mesh.element_faces[element];
  const int n_faces = static_cast<int>(face_ids.size());
  ops.n_local = ops.n_elem + n_faces * space.face_dim();

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(loop.size());
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (int v : loop) {
    pts.push_back(mesh.vertices[v]);
    center += mesh.vertices[v];
  }
  center /= static_cast<double>(loop.size());

  const int k = space.k;
  ops.quad_T = polygon_quadrature(pts, 2 * (k + 2));
  ops.basis_hi = element_basis(center, ops.h_T, k + 1, ops.quad_T);
  const int n_hi = ops.basis_hi.dimension();

  ops.phi_T = ops.basis_hi.values(ops.quad_T.points);
  ops.basis_hi.gradients(ops.quad_T.points, ops.dphi_x, ops.dphi_y);
  ops.stiffness = wgram(ops.dphi_x, ops.quad_T.weights, ops.dphi_x) +
                  wgram(ops.dphi_y, ops.quad_T.weights, ops.dphi_y);

  ops.quad_F.reserve(n_faces);
  ops.basis_F.reserve(n_faces);
  ops.psi_F.reserve(n_faces);
  ops.phi_TF.reserve(n_faces);

  // Reconstruction right-hand side, integration-by-parts form:
  //   (grad p, grad phi_i)_T = (grad v_T, grad phi_i)_T
  //                          + (v_dT - v_T, grad phi_i . n)_dT.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_hi, ops.n_local);
  B.leftCols(ops.n_elem) = ops.stiffness.leftCols(ops.n_elem);

  for (int i = 0; i < n_faces; ++i) {
    const int f = face_ids[i];
    // Both incident elements see the face in its stored orientation, so a
    // face dof has the same meaning on either side.
    const Eigen::Vector2d a = mesh.face_point(f, 0);
    const Eigen::Vector2d b = mesh.face_point(f, 1);
    ops.quad_F.push_back(segment_quadrature(a, b, 2 * k + 2));
    ops.basis_F.push_back(
        face_basis(a, b, k, ops.quad_F[i], face_mode == FaceBasisMode::Orthonormal));
    ops.psi_F.push_back(ops.basis_F[i].values(ops.quad_F[i].points));
    ops.phi_TF.push_back(ops.basis_hi.values(ops.quad_F[i].points));

    const Eigen::Vector2d n = mesh.outward_normal(f, element);
    Eigen::MatrixXd dfx, dfy;
    ops.basis_hi.gradients(ops.quad_F[i].points, dfx, dfy);
    Eigen::MatrixXd dphin = n.x() * dfx + n.y() * dfy;  // (nq x n_hi)

    B.leftCols(ops.n_elem) -=
        wgram(dphin, ops.quad_F[i].weights, ops.phi_TF[i].leftCols(ops.n_elem));
    B.middleCols(ops.face_offset(i), space.face_dim()) +=
        wgram(dphin, ops.quad_F[i].weights, ops.psi_F[i]);
  }

  // Mean-value closure: in the orthonormal graded basis the constant mode of
  // p must match the constant mode of v_T, which pins the stiffness kernel.
  Eigen::MatrixXd Kc = ops.stiffness;
  Kc.row(0).setZero();
  Kc(0, 0) = 1.0;
  B.row(0).setZero();
  B(0, 0) = 1.0;
  ops.reconstruction = Kc.partialPivLu().solve(B);

  // Difference operators. Projections onto P^l(T) are coefficient
  // truncations of the orthonormal graded basis.
  ops.diff_T = ops.reconstruction.topRows(ops.n_elem);
  ops.diff_T.leftCols(ops.n_elem) -= Eigen::MatrixXd::Identity(ops.n_elem, ops.n_elem);
  ops.diff_F.resize(n_faces);
  for (int i = 0; i < n_faces; ++i) {
    Eigen::MatrixXd TF = wgram(ops.psi_F[i], ops.quad_F[i].weights, ops.phi_TF[i]);
    Eigen::MatrixXd DF = TF * ops.reconstruction;
    if (!ops.basis_F[i].orthonormal) {
      Eigen::MatrixXd M = wgram(ops.psi_F[i], ops.quad_F[i].weights, ops.psi_F[i]);
      DF = M.ldlt().solve(DF);
    }
    DF.middleCols(ops.face_offset(i), space.face_dim()) -=
        Eigen::MatrixXd::Identity(space.face_dim(), space.face_dim());
    ops.diff_F[i] = DF;
  }

  ops.stab = stabilization_matrix(ops, variant);
  ops.bilinear =
      ops.reconstruction.transpose() * ops.stiffness * ops.reconstruction + ops.stab;

  // Load pieces.
  ops.elem_load = Eigen::VectorXd::Zero(ops.n_elem);
  if (source) {
    Eigen::VectorXd fw(ops.quad_T.size());
    for (int q = 0; q < ops.quad_T.size(); ++q)
      fw(q) = ops.quad_T.weights(q) * source(ops.quad_T.points[q]);
    ops.elem_load = ops.phi_T.leftCols(ops.n_elem).transpose() * fw;
  }

  // Static condensation of the element block.
  const int n_T = ops.n_elem;
  const int n_F = ops.n_face_dofs();
  Eigen::MatrixXd A_TT = ops.bilinear.topLeftCorner(n_T, n_T);
  Eigen::MatrixXd A_TF = ops.bilinear.topRightCorner(n_T, n_F);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A_TT);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("local condensation: element block not positive definite");
  ops.lift = -ldlt.solve(A_TF);
  ops.g_T = ldlt.solve(ops.elem_load);
  Eigen::MatrixXd schur =
      ops.bilinear.bottomRightCorner(n_F, n_F) + A_TF.transpose() * ops.lift;
  ops.schur = 0.5 * (schur + schur.transpose());
  ops.face_load = -A_TF.transpose() * ops.g_T;

  return ops;
}

Eigen::VectorXd interpolate(const LocalOperators& ops, const ScalarField& v) {
  Eigen::VectorXd dofs(ops.n_local);
  PolynomialBasis elem = basis_prefix(ops.basis_hi, ops.space.l);
  dofs.head(ops.n_elem) = l2_project(v, elem, ops.quad_T);
  for (int i = 0; i < ops.n_faces(); ++i)
    dofs.segment(ops.face_offset(i), ops.space.face_dim()) =
        l2_project(v, ops.basis_F[i], ops.quad_F[i]);
  return dofs;
}

double local_seminorm(const LocalOperators& ops, const Eigen::VectorXd& v) {
  const int n_T = ops.n_elem;
  Eigen::VectorXd ve = v.head(n_T);
  double grad2 = ve.dot(ops.stiffness.topLeftCorner(n_T, n_T) * ve);
  double bnd2 = 0.0;
  for (int i = 0; i < ops.n_faces(); ++i) {
    Eigen::VectorXd diff =
        ops.psi_F[i] * v.segment(ops.face_offset(i), ops.space.face_dim()) -
        ops.phi_TF[i].leftCols(n_T) * ve;
    bnd2 += diff.dot(ops.quad_F[i].weights.asDiagonal() * diff);
  }
  return std::sqrt(grad2 + bnd2 / ops.h_T);
}

}  // namespace hho2d
