#include "hho2d/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hho2d/common.hpp"

namespace hho2d {

namespace {

// Deterministic start vector (mt19937_64 output is specified by the standard,
// unlike the distribution adaptors).
Eigen::VectorXd start_vector(int n) {
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
  v.normalize();
  return v;
}

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double est_residual = 0.0;
};

// Lanczos with full reorthogonalisation; returns the largest Ritz pair of the
// operator. tol is relative to the Ritz value.
RitzPair lanczos_largest(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op,
                         int n, double tol, int max_iter) {
  max_iter = std::min(max_iter, n);
  Eigen::MatrixXd V(n, max_iter);
  Eigen::VectorXd alpha(max_iter), beta(max_iter);

  Eigen::VectorXd v = start_vector(n);
  V.col(0) = v;
  int m = 0;
  double est = 0.0;
  Eigen::VectorXd ritz_in_krylov;

  for (int j = 0; j < max_iter; ++j) {
    Eigen::VectorXd w = op(V.col(j));
    alpha(j) = V.col(j).dot(w);
    w -= alpha(j) * V.col(j);
    if (j > 0) w -= beta(j - 1) * V.col(j - 1);
    // Full reorthogonalisation keeps the basis clean for clustered spectra.
    w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    beta(j) = w.norm();
    m = j + 1;

    // Largest Ritz value of the current tridiagonal section.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha(i);
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    int top = m - 1;
    double theta = es.eigenvalues()(top);
    ritz_in_krylov = es.eigenvectors().col(top);
    est = std::abs(beta(j) * ritz_in_krylov(m - 1));
    if (est <= tol * std::abs(theta) || beta(j) <= 1e-14) break;
    if (j + 1 < max_iter) V.col(j + 1) = w / beta(j);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  RitzPair pair;
  pair.value = es.eigenvalues()(m - 1);
  pair.vector = V.leftCols(m) * es.eigenvectors().col(m - 1);
  pair.vector.normalize();
  pair.est_residual = est;
  return pair;
}

}  // namespace

ExtremeEigenvalues extreme_eigenvalues(const Eigen::SparseMatrix<double>& A,
                                       int dense_threshold) {
  const int n = static_cast<int>(A.rows());
  if (n < 1) throw EmptySystemError("extreme_eigenvalues: empty matrix");
  ExtremeEigenvalues out;

  if (n <= dense_threshold) {
    Eigen::MatrixXd dense(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success)
      throw NumericalError("extreme_eigenvalues: dense eigensolver failed");
    out.lambda_min = es.eigenvalues()(0);
    out.lambda_max = es.eigenvalues()(n - 1);
    Eigen::VectorXd vmin = es.eigenvectors().col(0);
    Eigen::VectorXd vmax = es.eigenvectors().col(n - 1);
    out.residual_min = (A * vmin - out.lambda_min * vmin).norm() / std::abs(out.lambda_min);
    out.residual_max = (A * vmax - out.lambda_max * vmax).norm() / std::abs(out.lambda_max);
    out.dense_path = true;
    return out;
  }

  out.dense_path = false;
  const double tol = 1e-8;
  const int max_iter = 400;

  RitzPair top = lanczos_largest([&A](const Eigen::VectorXd& x) { return A * x; }, n, tol,
                                 max_iter);
  out.lambda_max = top.value;
  out.residual_max =
      (A * top.vector - top.value * top.vector).norm() / std::abs(top.value);
  if (out.residual_max > tol)
    throw NumericalError("extreme_eigenvalues: lambda_max Lanczos stalled, residual " +
                         std::to_string(out.residual_max));

  // Smallest eigenvalue through the inverse: the condensed systems can reach
  // condition numbers ~1e6 where plain Lanczos stalls on the small end.
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("extreme_eigenvalues: matrix numerically singular "
                         "(shift-invert factorization failed)");
  RitzPair inv =
      lanczos_largest([&ldlt](const Eigen::VectorXd& x) { return ldlt.solve(x).eval(); },
                      n, tol, max_iter);
  out.lambda_min = 1.0 / inv.value;
  out.residual_min =
      (A * inv.vector - out.lambda_min * inv.vector).norm() / std::abs(out.lambda_min);
  if (out.residual_min > tol)
    throw NumericalError("extreme_eigenvalues: lambda_min Lanczos stalled, residual " +
                         std::to_string(out.residual_min));
  return out;
}

SpectralReport spectral_report(const CondensedSystem& system, const PolyMesh& mesh,
                               const MeshMetrics& metrics, int dense_threshold) {
  SpectralReport rep;
  rep.n_dofs = system.dofmap.n_dofs;
  ExtremeEigenvalues eig = extreme_eigenvalues(system.matrix, dense_threshold);
  CharacteristicLengths cl = characteristic_lengths(mesh, metrics);
  rep.lambda_min = eig.lambda_min;
  rep.lambda_max = eig.lambda_max;
  rep.kappa = eig.lambda_max / eig.lambda_min;
  rep.H_min = cl.H_min;
  rep.H_max = cl.H_max;
  rep.ratio_min = eig.lambda_min / cl.H_min;
  double kp1 = system.space.k + 1.0;
  rep.ratio_max = eig.lambda_max * cl.H_max / (kp1 * kp1);
  rep.dense_path = eig.dense_path;
  return rep;
}

}  // namespace hho2d
