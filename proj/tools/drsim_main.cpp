#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drsim/errors.hpp"
#include "drsim/experiment.hpp"
#include "drsim/metrics.hpp"

// Command-line front end. Exit codes: 0 success, 1 invariant failure,
// 2 usage or data error, 3 resource exhaustion.

namespace {

using namespace drsim;

ExperimentConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return ExperimentConfig{};
  return load_config(config_path);
}

void apply_overrides(ExperimentConfig& config, const std::string& solver,
                     bool seed_set, std::uint64_t seed, const std::string& out_dir) {
  if (!solver.empty()) config.solver = solver;
  if (seed_set) config.seed = seed;
  if (!out_dir.empty()) config.out_dir = out_dir;
}

int cmd_fit_utility(const ExperimentConfig& config, const std::string& params_out) {
  UtilityParams params = fit_utility(config, params_out);
  std::printf("rho    %.6g\n", params.rho);
  std::printf("gamma  %.6g\n", params.gamma);
  std::printf("omega  %.6g\n", params.omega);
  std::printf("a_hat  %.6g\n", params.a_hat);
  std::printf("u_check %.6g\n", params.u_check);
  if (!params_out.empty()) std::printf("saved to %s\n", params_out.c_str());
  return 0;
}

int cmd_gen_paths(const ExperimentConfig& config, const std::string& out_file) {
  ScenarioBundle bundle = build_scenario(config);
  std::string target = out_file.empty() ? "paths.csv" : out_file;
  write_paths_csv(target, bundle.paths);
  std::printf("wrote %d paths x %d days to %s (z bins: %zu, clamped z: %d)\n",
              static_cast<int>(bundle.paths.size()), bundle.horizon.days,
              target.c_str(), bundle.z_set.values.size(), bundle.clamped_z);
  return 0;
}

int cmd_run(const ExperimentConfig& config) {
  RunOutputs outputs = run_experiment(config);
  std::printf("utility: rho %.4g, gamma %.4g, a_hat %.4g\n", outputs.params.rho,
              outputs.params.gamma, outputs.params.a_hat);
  for (const CurveOutput& curve : outputs.curves) {
    std::printf("r=%g -> %s\n", curve.rebate_price, curve.csv_path.c_str());
    for (const CurvePoint& point : curve.curve.points) {
      std::printf("  X=%d bias_no_dr %+.3f%% bias_dr %+.3f%% manipulation %+.3f%% "
                  "(se %.3f)\n",
                  point.x, point.bias_no_dr_pct, point.bias_dr_pct,
                  point.manipulation_pct, point.sem_pct);
    }
  }
  std::printf("manifest: %s\n", outputs.manifest_path.c_str());
  return 0;
}

int cmd_validate(const ExperimentConfig& config, long long n_samples) {
  int failures = run_validate(config, n_samples, std::cout);
  return failures == 0 ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& files) {
  for (const std::string& file : files) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file);
    std::string header;
    if (!std::getline(in, header) ||
        header != "X,bias_no_dr_pct,bias_dr_pct,manipulation_pct,stderr_pct") {
      throw DataError(file + " is not a curve CSV");
    }
    std::vector<double> manipulation;
    std::printf("%s\n", file.c_str());
    std::printf("  %4s %14s %14s %14s %10s\n", "X", "bias_no_dr", "bias_dr",
                "manipulation", "stderr");
    std::string line;
    int row = 1;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      int x = 0;
      double no_dr = 0.0;
      double with_dr = 0.0;
      double manip = 0.0;
      double se = 0.0;
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &x, &no_dr, &with_dr, &manip,
                      &se) != 5) {
        throw DataError(file + ": malformed row " + std::to_string(row));
      }
      std::printf("  %4d %14.4f %14.4f %14.4f %10.4f\n", x, no_dr, with_dr, manip, se);
      manipulation.push_back(manip);
      ++row;
    }
    if (manipulation.empty()) throw DataError(file + " has no data rows");
    SinglePeakResult peak = single_peak_check(manipulation);
    std::printf("  manipulation single-peaked: %s (peak at row %d)\n",
                peak.is_single_peaked ? "yes" : "no", peak.peak_index + 1);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"average-baseline demand response simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string solver_override;
  std::string out_dir_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file (defaults if omitted)");
  app.add_option("--solver", solver_override, "override solver: exact_dp or rollout");
  app.add_option("--out", out_dir_override, "override output directory");
  auto* seed_opt = app.add_option("--seed", seed_override, "override master seed");

  auto* fit = app.add_subcommand("fit-utility", "estimate utility parameters");
  std::string params_out;
  fit->add_option("--params-out", params_out, "write fitted parameters to this file");

  auto* gen = app.add_subcommand("gen-paths", "generate scenario paths CSV");
  std::string paths_out;
  gen->add_option("--paths-out", paths_out, "output CSV path (default paths.csv)");

  app.add_subcommand("run", "full experiment: fit, simulate, solve, report");

  auto* validate = app.add_subcommand("validate", "run the invariant suites");
  long long n_samples = 2000;
  validate->add_option("--samples", n_samples, "cases per randomized property");
  std::string replay_name;
  long long replay_case = 0;
  auto* replay_opt = validate->add_option(
      "--replay", replay_name, "replay one reported property counterexample by name");
  auto* case_opt =
      validate->add_option("--case", replay_case, "case index for --replay");
  replay_opt->needs(case_opt);
  case_opt->needs(replay_opt);

  auto* report = app.add_subcommand("report", "print a saved curve CSV with diagnostics");
  std::vector<std::string> report_files;
  report->add_option("files", report_files, "curve CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  seed_set = seed_opt->count() > 0;

  try {
    ExperimentConfig config = load_or_default(config_path);
    apply_overrides(config, solver_override, seed_set, seed_override, out_dir_override);
    if (fit->parsed()) return cmd_fit_utility(config, params_out);
    if (gen->parsed()) return cmd_gen_paths(config, paths_out);
    if (app.get_subcommand("run")->parsed()) return cmd_run(config);
    if (validate->parsed()) {
      if (!replay_name.empty())
        return replay_property(config, replay_name, replay_case, std::cout);
      return cmd_validate(config, n_samples);
    }
    if (report->parsed()) return cmd_report(report_files);
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 3;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "resource error: out of memory\n");
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric invariant failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
