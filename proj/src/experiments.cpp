#include "hho2d/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hho2d {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double manufactured_solution(const Eigen::Vector2d& p) {
  return std::sin(kPi * p.x()) * std::sin(kPi * p.y());
}

double manufactured_source(const Eigen::Vector2d& p) {
  return 2.0 * kPi * kPi * manufactured_solution(p);
}

CaseResult run_case(const PolyMesh& mesh, const CaseOptions& options) {
  LocalSpace space = make_local_space(options.k, options.l);
  MeshMetrics metrics = compute_metrics(mesh);

  std::vector<LocalOperators> ops =
      build_element_operators(mesh, metrics, space, options.variant, options.source,
                              options.face_mode, options.threads);
  CondensedSystem system = assemble_condensed(mesh, ops);
  SpectralReport rep = spectral_report(system, mesh, metrics, options.dense_threshold);

  CaseResult r;
  r.h_min = metrics.h_min;
  r.h_max = metrics.h_max;
  r.n_cells = mesh.n_elements();
  r.n_internal_faces = static_cast<int>(mesh.internal_faces.size());
  r.epsilon = options.epsilon;
  r.lambda_min = rep.lambda_min;
  r.lambda_max = rep.lambda_max;
  r.kappa = rep.kappa;
  r.H_min = rep.H_min;
  r.H_max = rep.H_max;
  r.n_dofs = rep.n_dofs;
  r.dense_path = rep.dense_path;

  if (options.exact) {
    Eigen::VectorXd u = solve(system, options.dense_threshold);
    DiscreteSolution sol = recover(mesh, ops, system.dofmap, u);
    r.energy_err = energy_error(mesh, ops, system.dofmap, sol, options.exact);
  }
  return r;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw ConfigError("fit_slope: need at least 3 data pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw ConfigError("fit_slope: data must be positive");
    double lx = std::log(xs[i]);
    double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string csv_header() { return std::string(spectral_csv_header()) + ",EnergyError"; }

std::string csv_row(const CaseResult& r) {
  std::ostringstream out;
  out << fmt(r.h_min) << "," << fmt(r.h_max) << "," << r.n_cells << ","
      << r.n_internal_faces << ",";
  if (std::isfinite(r.epsilon)) out << fmt(r.epsilon);
  out << "," << fmt(r.lambda_min) << "," << fmt(r.lambda_max) << "," << fmt(r.kappa) << ",";
  if (std::isfinite(r.energy_err)) out << fmt(r.energy_err);
  return out.str();
}

namespace {

struct Row {
  int k = 0;
  CaseResult result;
};

void slope_line(std::vector<std::string>& summary, const std::vector<Row>& rows, int k,
                const char* name, const std::function<double(const CaseResult&)>& x,
                const std::function<double(const CaseResult&)>& y) {
  std::vector<double> xs, ys;
  for (const Row& r : rows) {
    if (r.k != k) continue;
    double xv = x(r.result), yv = y(r.result);
    if (xv > 0.0 && yv > 0.0) {
      xs.push_back(xv);
      ys.push_back(yv);
    }
  }
  if (xs.size() < 3) return;
  std::ostringstream line;
  line << "k=" << k << "  slope " << name << " = " << fmt(fit_slope(xs, ys));
  summary.push_back(line.str());
}

std::pair<PolyMesh, CutClassification> apply_aggregation(
    std::pair<PolyMesh, CutClassification> cut, const std::string& mode) {
  if (mode == "none") return cut;
  double eps2 = mode == "sliver" ? 0.0 : 0.3;
  if (mode != "sliver" && mode != "full")
    throw ConfigError("aggregate mode must be none, sliver or full");
  auto [mesh, plan] = aggregate(cut.first, cut.second, 0.05, eps2);
  CutClassification cls;  // classification of the aggregated mesh is not reused
  return {std::move(mesh), std::move(cls)};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult out;
  std::vector<Row> rows;
  std::ostringstream csv;
  csv << csv_header() << "\n";

  auto push_case = [&](int k, const PolyMesh& mesh, double eps, bool with_error) {
    CaseOptions opt;
    opt.k = k;
    opt.l = k + config.l_offset;
    opt.variant = config.variant;
    opt.face_mode = config.basis;
    opt.dense_threshold = config.dense_threshold;
    opt.threads = config.threads;
    opt.epsilon = eps;
    if (with_error) {
      opt.source = manufactured_source;
      opt.exact = manufactured_solution;
    }
    try {
      Row row{k, run_case(mesh, opt)};
      csv << csv_row(row.result) << "\n";
      rows.push_back(std::move(row));
    } catch (const std::exception& err) {
      out.row_errors.push_back("k=" + std::to_string(k) + ": " + err.what());
    }
  };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto inv = [](double v) { return 1.0 / v; };

  if (config.experiment == "coarsened") {
    int n0 = config.n_list.empty() ? 16 : config.n_list.front();
    PolyMesh fine = triangular_mesh(n0);
    std::vector<PolyMesh> meshes;
    for (int level = 1; level <= config.levels; ++level)
      meshes.push_back(coarsen(fine, level));
    for (int k : config.k_list)
      for (const PolyMesh& mesh : meshes) push_case(k, mesh, nan, false);
    for (int k : config.k_list) {
      slope_line(out.summary, rows, k, "Condition vs hMax^-1",
                 [&](const CaseResult& r) { return inv(r.h_max); },
                 [](const CaseResult& r) { return r.kappa; });
      slope_line(out.summary, rows, k, "MinEig vs hMax",
                 [](const CaseResult& r) { return r.h_max; },
                 [](const CaseResult& r) { return r.lambda_min; });
      slope_line(out.summary, rows, k, "MaxEig vs hMax^-1",
                 [&](const CaseResult& r) { return inv(r.h_max); },
                 [](const CaseResult& r) { return r.lambda_max; });
    }
  } else if (config.experiment == "ksweep") {
    int n0 = config.n_list.empty() ? 8 : config.n_list.front();
    std::vector<int> ks = config.k_list;
    if (ks.size() <= 1) {
      ks.clear();
      for (int k = 1; k <= 6; ++k) ks.push_back(k);
    }
    PolyMesh mesh = coarsen(triangular_mesh(n0), config.levels);
    for (int k : ks) push_case(k, mesh, nan, false);
    // Every row has a distinct k; fit against k+1 across rows.
    std::vector<double> kp1, kappa, lmax;
    for (const Row& r : rows) {
      kp1.push_back(r.k + 1.0);
      kappa.push_back(r.result.kappa);
      lmax.push_back(r.result.lambda_max);
    }
    if (kp1.size() >= 3) {
      out.summary.push_back("slope Condition vs (k+1) = " + fmt(fit_slope(kp1, kappa)));
      out.summary.push_back("slope MaxEig vs (k+1) = " + fmt(fit_slope(kp1, lmax)));
    }
  } else if (config.experiment == "cut_eps") {
    int n0 = config.n_list.empty() ? 8 : config.n_list.front();
    std::vector<double> eps_list = config.eps_list;
    if (eps_list.empty()) eps_list = {1e-2, 1e-3, 1e-4, 1e-5};
    for (int k : config.k_list) {
      for (double eps : eps_list) {
        try {
          auto cut = apply_aggregation(cut_strip_mesh(n0, eps), config.aggregate_mode);
          push_case(k, cut.first, eps, false);
        } catch (const std::exception& err) {
          out.row_errors.push_back("eps=" + fmt(eps) + ": " + err.what());
        }
      }
    }
    for (int k : config.k_list) {
      slope_line(out.summary, rows, k, "Condition vs Epsilon^-1",
                 [&](const CaseResult& r) { return inv(r.epsilon); },
                 [](const CaseResult& r) { return r.kappa; });
      slope_line(out.summary, rows, k, "MaxEig vs Epsilon^-1",
                 [&](const CaseResult& r) { return inv(r.epsilon); },
                 [](const CaseResult& r) { return r.lambda_max; });
      slope_line(out.summary, rows, k, "MinEig vs Epsilon^-1",
                 [&](const CaseResult& r) { return inv(r.epsilon); },
                 [](const CaseResult& r) { return r.lambda_min; });
    }
  } else if (config.experiment == "cut_refine") {
    std::vector<int> ns = config.n_list;
    if (ns.empty()) ns = {8, 16, 32, 64};
    for (int k : config.k_list) {
      for (int n : ns) {
        try {
          auto cut = apply_aggregation(cut_circle_mesh(n), config.aggregate_mode);
          push_case(k, cut.first, nan, false);
        } catch (const std::exception& err) {
          out.row_errors.push_back("n=" + std::to_string(n) + ": " + err.what());
        }
      }
    }
    for (int k : config.k_list) {
      slope_line(out.summary, rows, k, "Condition vs hMax^-1",
                 [&](const CaseResult& r) { return inv(r.h_max); },
                 [](const CaseResult& r) { return r.kappa; });
      slope_line(out.summary, rows, k, "Condition vs (hMin hMax)^-1",
                 [&](const CaseResult& r) { return inv(r.h_min * r.h_max); },
                 [](const CaseResult& r) { return r.kappa; });
      slope_line(out.summary, rows, k, "MaxEig vs hMin^-1",
                 [&](const CaseResult& r) { return inv(r.h_min); },
                 [](const CaseResult& r) { return r.lambda_max; });
      slope_line(out.summary, rows, k, "MinEig vs hMax",
                 [](const CaseResult& r) { return r.h_max; },
                 [](const CaseResult& r) { return r.lambda_min; });
    }
  } else if (config.experiment == "penta") {
    std::vector<int> ns = config.n_list;
    if (ns.empty()) ns = {8, 16, 32, 64};
    for (int k : config.k_list)
      for (int n : ns) push_case(k, penta_diagonal_mesh(n), nan, false);
    for (int k : config.k_list) {
      slope_line(out.summary, rows, k, "Condition vs hMin^-1",
                 [&](const CaseResult& r) { return inv(r.h_min); },
                 [](const CaseResult& r) { return r.kappa; });
      slope_line(out.summary, rows, k, "MaxEig vs hMin^-1",
                 [&](const CaseResult& r) { return inv(r.h_min); },
                 [](const CaseResult& r) { return r.lambda_max; });
      slope_line(out.summary, rows, k, "MinEig vs hMin^-1",
                 [&](const CaseResult& r) { return inv(r.h_min); },
                 [](const CaseResult& r) { return r.lambda_min; });
    }
  } else if (config.experiment == "convergence") {
    std::vector<int> ns = config.n_list;
    if (ns.empty()) ns = {4, 8, 16, 32};
    for (int k : config.k_list)
      for (int n : ns) push_case(k, cartesian_mesh(n), nan, true);
    for (int k : config.k_list) {
      slope_line(out.summary, rows, k, "EnergyError vs hMax",
                 [](const CaseResult& r) { return r.h_max; },
                 [](const CaseResult& r) { return r.energy_err; });
    }
  } else {
    throw ConfigError("unknown experiment '" + config.experiment + "'");
  }

  out.csv = csv.str();
  if (!config.out_path.empty()) {
    std::ofstream file(config.out_path);
    if (!file) throw ConfigError("cannot open output file " + config.out_path);
    file << out.csv;
    if (config.gnuplot) {
      std::ofstream gp(config.out_path + ".gp");
      gp << "set datafile separator ','\n"
         << "set logscale xy\n"
         << "set key autotitle columnhead\n"
         << "plot '" << config.out_path << "' using (1/$2):8 with linespoints"
         << " title 'Condition vs 1/hMax'\n";
    }
  }
  return out;
}

}  // namespace hho2d
