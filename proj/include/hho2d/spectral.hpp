// Extreme eigenvalues and condition number of the condensed system, compared
// against the characteristic-length bounds.

#ifndef HHO2D_SPECTRAL_HPP
#define HHO2D_SPECTRAL_HPP

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hho2d/assembly.hpp"
#include "hho2d/mesh.hpp"

namespace hho2d {

struct ExtremeEigenvalues {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double residual_min = 0.0;  ///< |A v - lambda v| / (lambda |v|)
  double residual_max = 0.0;
  bool dense_path = true;
};

/// Dense symmetric eigendecomposition for n <= dense_threshold; otherwise
/// Lanczos with full reorthogonalisation for lambda_max and shift-invert
/// Lanczos (single factorization) for lambda_min, both to residual 1e-8.
/// Throws NumericalError with the achieved residual on breakdown.
ExtremeEigenvalues extreme_eigenvalues(const Eigen::SparseMatrix<double>& A,
                                       int dense_threshold = 2000);

struct SpectralReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  double H_min = 0.0;
  double H_max = 0.0;
  double ratio_min = 0.0;  ///< lambda_min / H_min
  double ratio_max = 0.0;  ///< lambda_max * H_max / (k+1)^2
  int n_dofs = 0;
  bool dense_path = true;
};

SpectralReport spectral_report(const CondensedSystem& system, const PolyMesh& mesh,
                               const MeshMetrics& metrics, int dense_threshold = 2000);

/// Column names shared with the experiment driver's CSV output.
inline const char* spectral_csv_header() {
  return "hMin,hMax,NbCells,NbInternalEdges,Epsilon,MinEig,MaxEig,Condition";
}

}  // namespace hho2d

#endif
