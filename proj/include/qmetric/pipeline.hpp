#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qmetric/lee.hpp"
#include "qmetric/types.hpp"

namespace qmetric::pipeline {

enum class Model { Lee, CustomMatrixFiles };
enum class Method { Spectral, Generator, ClosedForm, All };

Method method_from_string(const std::string& name);  // throws ValidationError
std::string to_string(Method m);

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitRegimeError = 2;
inline constexpr int kExitIoError = 3;

struct RunConfig {
  Model model = Model::Lee;
  lee::Params lee;
  std::string h_path;       // custom model inputs
  std::string s_path;
  std::string family_path;  // optional generator family for custom models
  Method method = Method::All;
  double tol = kDefaultTol;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Deterministic seeded superposition over interacting-sector eigenvectors.
ComplexVector seeded_sector_state(const SpectralData& sd,
                                  const std::vector<lee::Classified>& classes,
                                  std::uint64_t seed);

struct Outcome {
  int exit_code = kExitOk;
  std::string message;
};

// build: constructs the requested metrics, writes artifacts + report.json
// into cfg.out_dir, runs the verification gates.
Outcome run_build(const RunConfig& cfg);

// verify: loads a metric candidate and runs the verification suite on it.
Outcome run_verify(const RunConfig& cfg, const std::string& q_path);

// evolve: propagates a state and writes the norm time series as CSV.
// state_spec: "seed:K" (seeded sector superposition K) or "file:PATH".
Outcome run_evolve(const RunConfig& cfg, const std::string& state_spec, double t_max,
                   int steps, double drift_tol);

}  // namespace qmetric::pipeline
