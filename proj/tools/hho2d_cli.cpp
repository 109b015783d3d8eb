// Experiment driver: builds the mesh families, assembles the condensed HHO
// system, measures extreme eigenvalues / condition numbers / energy errors,
// and writes CSV rows plus log-log slope summaries.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hho2d/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HHO conditioning experiments on polygonal meshes"};
  app.option_defaults()->always_capture_default();

  hho2d::ExperimentConfig config;
  std::string l_mode = "k";
  std::string stab = "main";
  std::string basis = "orthonormal";

  app.set_config("--config", "", "Read options from a key=value file");
  app.add_option("--experiment", config.experiment,
                 "coarsened | ksweep | cut_eps | cut_refine | penta | convergence")
      ->required();
  app.add_option("--k", config.k_list, "Face polynomial degree(s), 0..9")
      ->check(CLI::Range(0, 9));
  app.add_option("--l-mode", l_mode, "Element degree: k-1 | k | k+1")
      ->check(CLI::IsMember({"k-1", "k", "k+1"}));
  app.add_option("--stab", stab, "main | kminus1 | boundary | gradient | hdg");
  app.add_option("--n", config.n_list, "Mesh parameter list");
  app.add_option("--eps", config.eps_list, "Epsilon list for cut_eps");
  app.add_option("--levels", config.levels, "Coarsening levels");
  app.add_option("--basis", basis, "orthonormal | raw face bases")
      ->check(CLI::IsMember({"orthonormal", "raw"}));
  app.add_option("--aggregate", config.aggregate_mode,
                 "Cut-cell aggregation: none | sliver | full")
      ->check(CLI::IsMember({"none", "sliver", "full"}));
  app.add_option("--out", config.out_path, "Output CSV path");
  app.add_flag("--gnuplot", config.gnuplot, "Also emit a gnuplot script next to the CSV");
  app.add_option("--threads", config.threads, "Worker threads (0 = hardware)");
  app.add_option("--dense-threshold", config.dense_threshold,
                 "Dense eigensolver/solver size limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitConfig;
  }

  try {
    config.l_offset = l_mode == "k-1" ? -1 : (l_mode == "k+1" ? 1 : 0);
    config.variant = hho2d::stabilization_from_string(stab);
    config.basis = basis == "raw" ? hho2d::FaceBasisMode::RawMonomial
                                  : hho2d::FaceBasisMode::Orthonormal;
    if (config.out_path.empty()) config.out_path = config.experiment + ".csv";

    // Validate admissibility up front so bad configurations exit with 2.
    for (int k : config.k_list)
      hho2d::check_admissible(hho2d::make_local_space(k, k + config.l_offset),
                              config.variant);

    hho2d::ExperimentResult result = hho2d::run_experiment(config);
    std::cout << result.csv;
    if (!result.summary.empty()) {
      std::cout << "# summary\n";
      for (const std::string& line : result.summary) std::cout << "#   " << line << "\n";
    }
    for (const std::string& err : result.row_errors)
      std::cerr << "row aborted: " << err << "\n";
    std::cerr << "wrote " << config.out_path << "\n";
    return result.row_errors.empty() ? 0 : kExitNumerical;
  } catch (const hho2d::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
