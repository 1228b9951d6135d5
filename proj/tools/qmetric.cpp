#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmetric/errors.hpp"
#include "qmetric/pipeline.hpp"

namespace {

using qmetric::pipeline::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::string method;
  std::string out_dir;
  double tol = -1.0;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration JSON")->required();
  cmd->add_option("--method", flags.method, "spectral|generator|closed-form|all");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--tol", flags.tol, "numerical tolerance");
  cmd->add_option("--seed", flags.seed, "seed for reproducible random states");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig cfg = qmetric::pipeline::load_config(flags.config_path);
  if (!flags.method.empty()) cfg.method = qmetric::pipeline::method_from_string(flags.method);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.tol > 0.0) cfg.tol = flags.tol;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!(cfg.tol > 0.0) || cfg.tol >= 1e-2) {
    throw qmetric::ValidationError("tol must lie in (0, 1e-2)");
  }
  return cfg;
}

int report(const qmetric::pipeline::Outcome& outcome) {
  (outcome.exit_code == 0 ? std::cout : std::cerr) << outcome.message << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-operator construction and verification for pseudo-Hermitian Hamiltonians"};
  app.require_subcommand(1);

  CommonFlags build_flags;
  CLI::App* build = app.add_subcommand(
      "build", "construct metric operators and write artifacts + report");
  add_common(build, build_flags);

  CommonFlags verify_flags;
  std::string q_path;
  CLI::App* verify = app.add_subcommand("verify", "run the verification suite on a metric file");
  add_common(verify, verify_flags);
  verify->add_option("--q", q_path, "metric matrix JSON to verify")->required();

  CommonFlags evolve_flags;
  std::string state_spec = "seed:0";
  double t_max = 10.0;
  int steps = 101;
  double drift_tol = 1e-8;
  CLI::App* evolve = app.add_subcommand("evolve", "propagate a state and tabulate norms");
  add_common(evolve, evolve_flags);
  evolve->add_option("--state", state_spec, "seed:K or file:PATH");
  evolve->add_option("--t-max", t_max, "final time");
  evolve->add_option("--steps", steps, "number of grid points");
  evolve->add_option("--drift-tol", drift_tol, "q-norm drift bound for exit status");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      return report(qmetric::pipeline::run_build(resolve(build_flags)));
    }
    if (verify->parsed()) {
      return report(qmetric::pipeline::run_verify(resolve(verify_flags), q_path));
    }
    return report(qmetric::pipeline::run_evolve(resolve(evolve_flags), state_spec, t_max,
                                                steps, drift_tol));
  } catch (const qmetric::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return qmetric::pipeline::kExitRegimeError;
  } catch (const qmetric::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return qmetric::pipeline::kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qmetric::pipeline::kExitVerificationFailure;
  }
}
