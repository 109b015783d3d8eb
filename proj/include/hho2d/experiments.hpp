// Experiment driver: builds the mesh families, assembles and measures each
// case, and emits CSV rows with the shared column schema plus log-log slope
// summaries.

#ifndef HHO2D_EXPERIMENTS_HPP
#define HHO2D_EXPERIMENTS_HPP

#include <limits>
#include <string>
#include <vector>

#include "hho2d/assembly.hpp"
#include "hho2d/mesh_factory.hpp"
#include "hho2d/spectral.hpp"

namespace hho2d {

struct CaseOptions {
  int k = 0;
  int l = 0;
  StabilizationVariant variant = StabilizationVariant::Main;
  FaceBasisMode face_mode = FaceBasisMode::Orthonormal;
  ScalarField source;  ///< optional
  ScalarField exact;   ///< optional; enables the solve + energy error
  int dense_threshold = 2000;
  unsigned threads = 1;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  ///< reporting only
};

struct CaseResult {
  double h_min = 0.0, h_max = 0.0;
  int n_cells = 0, n_internal_faces = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double lambda_min = 0.0, lambda_max = 0.0, kappa = 0.0;
  double energy_err = std::numeric_limits<double>::quiet_NaN();
  double H_min = 0.0, H_max = 0.0;
  int n_dofs = 0;
  bool dense_path = true;
};

/// Assembles the condensed system on the mesh and measures its spectrum;
/// solves and measures the energy error when `exact` is provided.
CaseResult run_case(const PolyMesh& mesh, const CaseOptions& options);

/// Least-squares slope of log y against log x. Requires at least 3 pairs of
/// positive data.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

std::string csv_header();
std::string csv_row(const CaseResult& r);

/// Manufactured Dirichlet problem on (0,1)^2: u = sin(pi x) sin(pi y).
double manufactured_solution(const Eigen::Vector2d& p);
double manufactured_source(const Eigen::Vector2d& p);

// --------------------------------------------------------------------------
//   Named experiments
// --------------------------------------------------------------------------

struct ExperimentConfig {
  std::string experiment;  ///< coarsened | ksweep | cut_eps | cut_refine | penta | convergence
  std::vector<int> k_list = {0};
  int l_offset = 0;  ///< l = k + offset, offset in {-1, 0, +1}
  StabilizationVariant variant = StabilizationVariant::Main;
  FaceBasisMode basis = FaceBasisMode::Orthonormal;
  std::vector<int> n_list;
  std::vector<double> eps_list;
  int levels = 4;
  std::string aggregate_mode = "none";  ///< none | sliver | full
  std::string out_path;
  bool gnuplot = false;
  unsigned threads = 1;
  int dense_threshold = 2000;
};

struct ExperimentResult {
  std::string csv;                       ///< full CSV text, header included
  std::vector<std::string> summary;      ///< slope lines per plotted quantity
  std::vector<std::string> row_errors;   ///< reasons for aborted rows
};

/// Runs one experiment; rows that fail are logged and skipped. Writes the CSV
/// (and optionally a gnuplot script) when out_path is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace hho2d

#endif
