// Entry point for the DG Navier-Stokes pressure-correction solver:
//   nsdg simulate     run one simulation, write the per-step monitor CSV
//   nsdg study        run a mesh-refinement convergence study
//   nsdg verify-forms run the randomized exact-identity suite
//
// Flags mirror the flat key=value config file; flags override file values.
// The NSDG_THREADS environment variable bounds the linear-algebra threads.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>

#include "nsdg/config.hpp"
#include "nsdg/io.hpp"
#include "nsdg/mms.hpp"
#include "nsdg/verify.hpp"

namespace {

using namespace nsdg;

TimestepMode mode_from_string(const std::string& s) {
  if (s == "h2") return TimestepMode::ProportionalH2;
  if (s == "h") return TimestepMode::ProportionalH;
  return TimestepMode::Fixed;
}

void warn_delta(const RunConfig& config) {
  if (config.delta_warning())
    std::cerr << "warning: delta = " << config.delta
              << " exceeds the admissible divergence-damping range delta <= 1/(4d) = 0.125\n";
}

int run_simulate(const RunConfig& config) {
  warn_delta(config);
  const ManufacturedCase mms = make_case(config.case_name, config.mu);
  const double h = std::sqrt(2.0) / config.n;
  const TimestepChoice choice =
      timestep_rule(h, mode_from_string(config.tau_mode), config.tau_c, config.T);
  if (!choice.window_ok)
    std::cerr << "warning: tau = " << choice.tau << " outside the window ["
              << choice.window_lo << ", " << choice.window_hi << "]\n";

  const Mesh mesh = Mesh::uniform_square(config.n);
  const QuadratureRule rule = QuadratureRule::make(3 * config.k + 2);
  const FunctionSpace space_x(mesh, config.k, 2, rule);
  const FunctionSpace space_m(mesh, config.k - 1, 1, rule);

  SchemeParams params;
  params.mu = config.mu;
  params.tau = choice.tau;
  params.T = config.T;
  params.k = config.k;
  params.penalties = config.penalties();

  PressureCorrectionScheme scheme(space_x, space_m, params);
  std::vector<MonitorRow> monitor;
  const State final_state = scheme.run(
      [&mms](const Vec2& x, double t) { return mms.forcing(x, t); },
      [&mms](const Vec2& x) { return mms.velocity(x, 0.0); }, &monitor);

  write_text_atomic(config.output_dir + "/monitor.csv", monitor_csv(monitor));
  std::cout << "simulate: " << choice.n_steps << " steps, final ||u|| = "
            << final_state.u.l2_norm()
            << ", mean(p) = " << scheme.mean_pressure(final_state) << "\n"
            << "wrote " << config.output_dir << "/monitor.csv\n";
  return 0;
}

int run_study(const RunConfig& config, const RateThresholds& thresholds) {
  warn_delta(config);
  const ManufacturedCase mms = make_case(config.case_name, config.mu);
  const ConvergenceReport report =
      convergence_study(mms, config.k, config.levels, mode_from_string(config.tau_mode),
                        config.tau_c, config.T, config.penalties());

  std::ostringstream csv;
  report.write_csv(csv);
  write_text_atomic(config.output_dir + "/study.csv", csv.str());
  const std::string summary = report_summary(report, thresholds);
  write_text_atomic(config.output_dir + "/study_summary.txt", summary);
  std::cout << summary << "wrote " << config.output_dir << "/study.csv\n";
  return report_pass(report, thresholds) ? 0 : 1;
}

int run_verify(const RunConfig& config) {
  const std::vector<IdentityCheck> checks =
      run_form_checks(config.n, {config.k}, config.trials, config.seed);
  const std::string table =
      format_check_table(checks) + "seed: " + std::to_string(config.seed) + "\n";
  write_text_atomic(config.output_dir + "/verify.txt", table);
  std::cout << table;
  return all_pass(checks) ? 0 : 1;
}

// --config must be applied before flag parsing so that flags override it.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("NSDG_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  RunConfig config;
  const std::string config_path = find_config_path(argc, argv);
  if (!config_path.empty()) {
    try {
      config = parse_config_file(config_path);
    } catch (const std::exception& err) {
      std::cerr << "error: " << err.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"Interior-penalty DG Navier-Stokes pressure-correction solver"};
  app.require_subcommand(1);

  std::string ignored_config_path;
  std::string levels_text;
  RateThresholds thresholds;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", ignored_config_path, "flat key=value config file");
    cmd->add_option("--k", config.k, "velocity degree (pressure degree k-1)");
    cmd->add_option("--mu", config.mu, "viscosity");
    cmd->add_option("--sigma", config.sigma, "velocity penalty (default 10(k+1)^2)");
    cmd->add_option("--sigma-tilde", config.sigma_tilde, "scalar penalty (default 10(k+1)^2)");
    cmd->add_option("--delta", config.delta, "divergence damping weight");
    cmd->add_option("--T", config.T, "final time");
    cmd->add_option("--tau-mode", config.tau_mode, "timestep rule: h2 | h | fixed");
    cmd->add_option("--tau-c", config.tau_c, "timestep rule constant");
    cmd->add_option("--case", config.case_name, "manufactured case name");
    cmd->add_option("--output-dir", config.output_dir, "artifact directory");
    cmd->add_option("--seed", config.seed, "seed for randomized identity tests");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one simulation");
  add_common(simulate);
  simulate->add_option("--n", config.n, "mesh subdivisions per side");

  CLI::App* study = app.add_subcommand("study", "run a convergence study");
  add_common(study);
  study->add_option("--levels", levels_text, "comma-separated mesh levels, e.g. 4,8,16");
  study->add_option("--min-rate-u", thresholds.min_u_spacetime,
                    "required space-time velocity rate (0 = report only)");
  study->add_option("--min-rate-u-dg", thresholds.min_u_dg, "required DG velocity rate");
  study->add_option("--min-rate-p", thresholds.min_p_spacetime, "required pressure rate");
  study->add_option("--min-rate-dtu", thresholds.min_dtu, "required time-derivative rate");

  CLI::App* verify = app.add_subcommand("verify-forms", "run the identity suite");
  add_common(verify);
  verify->add_option("--n", config.n, "mesh subdivisions per side");
  verify->add_option("--trials", config.trials, "random fields per identity");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  if (!levels_text.empty()) config.levels = parse_int_list(levels_text);

  try {
    config.validate();
    if (config.command == "simulate") return run_simulate(config);
    if (config.command == "study") return run_study(config, thresholds);
    return run_verify(config);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
