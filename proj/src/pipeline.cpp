#include "qmetric/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmetric/errors.hpp"
#include "qmetric/io.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/verify.hpp"

namespace qmetric::pipeline {

using nlohmann::json;

Method method_from_string(const std::string& name) {
  if (name == "spectral") return Method::Spectral;
  if (name == "generator") return Method::Generator;
  if (name == "closed-form") return Method::ClosedForm;
  if (name == "all") return Method::All;
  throw ValidationError("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Spectral: return "spectral";
    case Method::Generator: return "generator";
    case Method::ClosedForm: return "closed-form";
    case Method::All: return "all";
  }
  return "?";
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  const std::string model = j.value("model", "lee");
  if (model == "lee") {
    cfg.model = Model::Lee;
  } else if (model == "custom-matrix-files") {
    cfg.model = Model::CustomMatrixFiles;
  } else {
    throw ValidationError("config: unknown model '" + model + "'");
  }
  cfg.lee.m_theta = j.value("m_theta", cfg.lee.m_theta);
  cfg.lee.m_v = j.value("m_V", cfg.lee.m_v);
  cfg.lee.m_n = j.value("m_N", cfg.lee.m_n);
  cfg.lee.g = j.value("g", cfg.lee.g);
  cfg.lee.n_max = j.value("n_max", cfg.lee.n_max);
  cfg.h_path = j.value("H", "");
  cfg.s_path = j.value("S", "");
  cfg.family_path = j.value("generator_family", "");
  cfg.method = method_from_string(j.value("method", "all"));
  cfg.tol = j.value("tol", kDefaultTol);
  cfg.out_dir = j.value("output_dir", "out");
  cfg.seed = j.value("seed", std::uint64_t{1});

  if (!(cfg.tol > 0.0) || cfg.tol >= 1e-2) {
    throw ValidationError("config: tol must lie in (0, 1e-2)");
  }
  if (cfg.method == Method::ClosedForm && cfg.model != Model::Lee) {
    throw ValidationError("config: method closed-form is only defined for the lee model");
  }
  if (cfg.model == Model::CustomMatrixFiles && (cfg.h_path.empty() || cfg.s_path.empty())) {
    throw ValidationError("config: custom-matrix-files model needs H and S paths");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return config_from_json(io::read_json_file(path));
}

ComplexVector seeded_sector_state(const SpectralData& sd,
                                  const std::vector<lee::Classified>& classes,
                                  std::uint64_t seed) {
  const std::vector<int> idx =
      lee::sector_eigen_indices(classes, static_cast<int>(classes.size()));
  if (idx.empty()) {
    throw ValidationError("seeded_sector_state: no interacting-sector eigenvectors");
  }
  SplitMix64 rng(seed);
  ComplexVector state = ComplexVector::Zero(sd.dim());
  for (int k : idx) state += rng.gaussian() * sd.right_vectors.col(k);
  state /= state.norm();
  return state;
}

namespace {

ComplexVector seeded_inspect_state(const SpectralData& sd, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ComplexVector state = ComplexVector::Zero(sd.dim());
  for (int k = 0; k < sd.dim(); ++k) {
    if (sd.in_spect[k]) state += rng.gaussian() * sd.right_vectors.col(k);
  }
  const double nrm = state.norm();
  if (nrm == 0.0) throw ValidationError("seeded state: empty spect");
  return state / nrm;
}

std::vector<double> time_grid(double t_max, int steps) {
  std::vector<double> ts(steps);
  for (int i = 0; i < steps; ++i) {
    ts[i] = steps > 1 ? t_max * double(i) / double(steps - 1) : 0.0;
  }
  return ts;
}

// Largest off-pairing magnitude of the q-Gram over in-spect eigenvectors,
// relative to the largest pairing-diagonal magnitude.
double gram_structure_residual(const ComplexMatrix& q, const SpectralData& sd) {
  std::vector<int> idx;
  for (int k = 0; k < sd.dim(); ++k) {
    if (sd.in_spect[k]) idx.push_back(k);
  }
  const int m = static_cast<int>(idx.size());
  if (m == 0) return 0.0;
  ComplexMatrix span(sd.dim(), m);
  for (int j = 0; j < m; ++j) span.col(j) = sd.right_vectors.col(idx[j]);
  const ComplexMatrix g = span.adjoint() * q * span;
  std::vector<int> pos(sd.dim(), -1);
  for (int j = 0; j < m; ++j) pos[idx[j]] = j;
  double off = 0.0;
  double diag = 0.0;
  for (int j = 0; j < m; ++j) {
    const int jp = pos[sd.pairing[idx[j]]];
    diag = std::max(diag, std::abs(g(jp, j)));
    for (int i = 0; i < m; ++i) {
      if (i != jp) off = std::max(off, std::abs(g(i, j)));
    }
  }
  return diag > 0.0 ? off / diag : off;
}

struct ModelContext {
  PseudoHermitianSystem sys;
  std::optional<fock::Basis> basis;
  SpectralData sd;
  std::vector<lee::Classified> classes;  // lee only
};

ModelContext make_context(const RunConfig& cfg) {
  ModelContext ctx;
  if (cfg.model == Model::Lee) {
    ctx.basis.emplace(cfg.lee.n_max);
    ctx.sys = {lee::hamiltonian(cfg.lee, *ctx.basis), fock::parity_op(*ctx.basis), cfg.tol};
    // Exceptional points make H defective; diagnose them up front.
    for (int n = 0; n < cfg.lee.n_max; ++n) {
      (void)lee::solve_sector(cfg.lee, n);  // throws RegimeError at an EP
    }
  } else {
    ctx.sys = {io::matrix_from_json(io::read_json_file(cfg.h_path)),
               io::matrix_from_json(io::read_json_file(cfg.s_path)), cfg.tol};
  }
  ctx.sd = decompose(ctx.sys);
  phase_coefficients(ctx.sd, ctx.sys.S);
  if (cfg.model == Model::Lee) {
    ctx.classes = lee::classify(ctx.sd, *ctx.basis, cfg.lee);
  }
  return ctx;
}

std::vector<ComplexVector> seeded_states(const RunConfig& cfg, const ModelContext& ctx,
                                         int count) {
  std::vector<ComplexVector> states;
  for (int i = 0; i < count; ++i) {
    if (cfg.model == Model::Lee) {
      states.push_back(seeded_sector_state(ctx.sd, ctx.classes, cfg.seed + i));
    } else {
      states.push_back(seeded_inspect_state(ctx.sd, cfg.seed + i));
    }
  }
  return states;
}

struct GateSet {
  double conditions;
  double residuals;
  double drift;
  double structure;
};

GateSet gates_for(double tol) {
  return {100.0 * tol, 10.0 * tol, 100.0 * tol, 100.0 * tol};
}

json convention_notes() {
  return json::array(
      {"sector energies and coefficients use the radical sqrt(mu^2 - 4 g^2 (n+1)); the "
       "(n+1)-free variant fails the per-sector 2x2 diagonalization oracle",
       "eigenvector coefficients are fixed by the sector eigenvalue equation: alpha = i (mu + "
       "sqrt(mu^2 - 4 g^2 (n+1))) / (2 g) * beta; with this convention the cross identity reads "
       "alpha * conj(beta) = i g / sqrt(mu^2 - 4 g^2 (n+1))",
       "closed-form diagonal statements (<Psi|q|Psi> = n!) hold in the raw-ket convention "
       "(theta^dag)^n |0>; spectral and generator metrics normalize eigenvectors to Dirac unit "
       "norm",
       "the closed-form metric vanishes on the doubly-occupied tower |n,1,1>; positivity is "
       "asserted on the n_V + n_N <= 1 subspace"});
}

// Positivity gating: constructed metrics must be positive definite on H';
// external candidates may be semidefinite (the closed form has an exact
// kernel on the doubly-occupied tower) but never indefinite.
enum class PositivityGate { Strict, NotIndefinite, None };

// Verification shared by build and verify subcommands. Returns pass flag.
bool verify_metric(const RunConfig& cfg, const ModelContext& ctx, const ComplexMatrix& q,
                   const std::vector<ComplexVector>& states, PositivityGate positivity,
                   verify::MetricReport& report, json& check_json) {
  const GateSet gate = gates_for(cfg.tol);
  const bool real_spectrum = ctx.sd.spectrum_real();

  report = verify::positivity_report(q, ctx.sd);
  report.selfadjointness_residual = verify::selfadjointness_residual(q, ctx.sys.H);
  const std::vector<double> ts = time_grid(10.0, 101);
  report.unitarity_drift = 0.0;
  for (const auto& s : states) {
    report.unitarity_drift =
        std::max(report.unitarity_drift, verify::unitarity_check(ctx.sd, q, s, ts));
  }
  const double structure = gram_structure_residual(q, ctx.sd);

  bool pass = report.selfadjointness_residual <= gate.residuals;
  pass = pass && structure <= gate.structure;
  if (real_spectrum) {
    pass = pass && report.hermiticity_residual <= gate.residuals;
    pass = pass && report.unitarity_drift <= gate.drift;
    if (positivity == PositivityGate::Strict) {
      pass = pass && report.positivity_status == verify::Positivity::Positive;
    } else if (positivity == PositivityGate::NotIndefinite) {
      pass = pass && report.positivity_status != verify::Positivity::Indefinite;
    }
  }

  check_json = json{{"selfadjointness_residual", report.selfadjointness_residual},
                    {"gram_off_pairing", structure},
                    {"hermiticity_residual", report.hermiticity_residual},
                    {"unitarity_drift", report.unitarity_drift},
                    {"positivity_status", verify::to_string(report.positivity_status)},
                    {"pass", pass}};
  return pass;
}

// output_dir is deliberately not echoed: artifacts must not depend on where
// they are written.
json config_echo(const RunConfig& cfg) {
  json j{{"model", cfg.model == Model::Lee ? "lee" : "custom-matrix-files"},
         {"method", to_string(cfg.method)},
         {"tol", cfg.tol},
         {"seed", cfg.seed}};
  if (cfg.model == Model::Lee) {
    j["m_theta"] = cfg.lee.m_theta;
    j["m_V"] = cfg.lee.m_v;
    j["m_N"] = cfg.lee.m_n;
    j["g"] = cfg.lee.g;
    j["n_max"] = cfg.lee.n_max;
  }
  return j;
}

}  // namespace

Outcome run_build(const RunConfig& cfg) {
  try {
    const ModelContext ctx = make_context(cfg);
    const GateSet gate = gates_for(cfg.tol);
    const bool real_spectrum = ctx.sd.spectrum_real();
    const bool want_spectral = cfg.method == Method::Spectral || cfg.method == Method::All;
    const bool want_generator = cfg.method == Method::Generator || cfg.method == Method::All;
    const bool want_closed = cfg.method == Method::ClosedForm || cfg.method == Method::All;

    std::filesystem::create_directories(cfg.out_dir);
    const auto out = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

    io::write_json_file(out("hamiltonian.json"), io::matrix_to_json(ctx.sys.H));
    io::write_json_file(out("s.json"), io::matrix_to_json(ctx.sys.S));
    if (ctx.basis) io::write_json_file(out("basis.json"), io::basis_to_json(*ctx.basis));
    io::write_json_file(out("spectral_data.json"), io::spectral_data_to_json(ctx.sd));

    json report;
    report["config"] = config_echo(cfg);
    report["spectrum"] = json{
        {"regime", real_spectrum ? "real" : "broken"},
        {"dim", ctx.sd.dim()},
        {"in_spect_count",
         std::count(ctx.sd.in_spect.begin(), ctx.sd.in_spect.end(), true)}};
    report["convention_notes"] = convention_notes();

    const std::vector<ComplexVector> states = seeded_states(cfg, ctx, 3);
    bool all_pass = true;
    json methods;

    // Indefiniteness witnesses for S (diagnostic; S = parity is indefinite).
    try {
      const auto [vp, vm] = verify::s_indefiniteness_witness(ctx.sys.S, cfg.tol);
      report["s_witness"] = json{
          {"positive_value", s_form(ctx.sys.S, vp, vp).real()},
          {"negative_value", s_form(ctx.sys.S, vm, vm).real()}};
    } catch (const ValidationError&) {
      report["s_witness"] = "semidefinite";
    }

    ComplexMatrix q_spectral;
    if (want_spectral) {
      q_spectral = build_q_spectral(ctx.sys, ctx.sd);
      io::write_json_file(out("q_spectral.json"), io::matrix_to_json(q_spectral));
      verify::MetricReport mr;
      json checks;
      all_pass &= verify_metric(cfg, ctx, q_spectral, states, PositivityGate::Strict, mr, checks);
      methods["spectral"] = io::metric_report_to_json(mr);
      methods["spectral"]["checks"] = checks;
    }

    const bool have_family = cfg.model == Model::Lee || !cfg.family_path.empty();
    if (want_generator && !have_family) {
      if (cfg.method == Method::Generator) {
        throw ValidationError("build: generator method for a custom model needs a family file");
      }
      methods["generator"] = json{{"status", "skipped-no-generator-family"}};
    }
    if (want_generator && have_family) {
      generator::Family family;
      if (cfg.model == Model::Lee) {
        family = lee::generator_family(cfg.lee, *ctx.basis, /*normalized=*/true);
      } else {
        family = io::family_from_json(io::read_json_file(cfg.family_path));
      }
      family.tol = cfg.tol;
      generator::normalize_references(family);
      const generator::Validation val = generator::validate_family(ctx.sys.H, family);
      const ComplexMatrix q_gen = generator::build_q_generator(ctx.sys.H, family, ctx.sd);
      io::write_json_file(out("q_generator.json"), io::matrix_to_json(q_gen));
      io::write_json_file(out("generator_family.json"), io::family_to_json(family));

      verify::MetricReport mr;
      json checks;
      bool pass = verify_metric(cfg, ctx, q_gen, states, PositivityGate::Strict, mr, checks);
      pass = pass && val.max_residual_i <= gate.conditions &&
             val.max_residual_ii <= gate.conditions && val.max_residual_iii <= gate.conditions &&
             val.cprime_deviation <= gate.conditions;
      json gen_json = io::metric_report_to_json(mr);
      gen_json["checks"] = checks;
      gen_json["condition_i_residual"] = val.max_residual_i;
      gen_json["condition_ii_residual"] = val.max_residual_ii;
      gen_json["condition_iii_residual"] = val.max_residual_iii;
      gen_json["cprime_deviation"] = val.cprime_deviation;
      // The positive-diagonal relation is a real-spectrum notion; in the
      // broken regime only the delta-pairing Gram structure is asserted
      // (already part of verify_metric).
      if (want_spectral && real_spectrum) {
        const verify::Equivalence eq = verify::equivalence_up_to_positive_diagonal(
            q_spectral, q_gen, ctx.sd, {}, gate.structure);
        gen_json["equivalent_to_spectral"] = eq.is_equivalent;
        gen_json["sector_scalars"] = eq.scalars;
        pass = pass && eq.is_equivalent;
      }
      gen_json["checks"]["pass"] = pass;
      methods["generator"] = gen_json;
      all_pass &= pass;
    }

    if (want_closed && cfg.model == Model::Lee) {
      if (!real_spectrum && cfg.method == Method::All) {
        methods["closed_form"] = json{{"status", "skipped-complex-spectrum"}};
      } else {
        // Throws RegimeError in the broken regime when requested explicitly.
        const ComplexMatrix q_closed = lee::closed_form_metric(cfg.lee, *ctx.basis);
        io::write_json_file(out("q_closed_form.json"), io::matrix_to_json(q_closed));

        verify::MetricReport mr;
        json checks;
        // The closed form is positive on its support with an exact kernel on
        // the doubly-occupied tower, so semidefinite is its healthy state.
        bool pass = verify_metric(cfg, ctx, q_closed, states, PositivityGate::NotIndefinite, mr,
                                  checks);

        double ident = 0.0;
        for (int n = 0; n < cfg.lee.n_max; ++n) {
          const auto id = lee::sector_identities(cfg.lee, n);
          ident = std::max({ident, id.norm_combination, id.cross_term});
        }
        pass = pass && ident <= gate.conditions;

        const ComplexMatrix c_op = lee::c_operator(q_closed, ctx.sys.S);
        std::vector<ComplexVector> sector_states;
        for (int k : lee::sector_eigen_indices(ctx.classes, cfg.lee.n_max - 1)) {
          sector_states.push_back(ctx.sd.right_vectors.col(k));
        }
        const double invol = verify::involution_check(c_op, sector_states);
        pass = pass && invol <= gate.conditions;

        json cf = io::metric_report_to_json(mr);
        cf["checks"] = checks;
        cf["sector_identities_max_deviation"] = ident;
        cf["involution_residual"] = invol;
        if (want_spectral) {
          const verify::Equivalence eq = verify::equivalence_up_to_positive_diagonal(
              q_spectral, q_closed, ctx.sd,
              lee::sector_eigen_indices(ctx.classes, cfg.lee.n_max - 1), gate.structure);
          cf["equivalent_to_spectral_on_sectors"] = eq.is_equivalent;
          cf["sector_scalars"] = eq.scalars;
          pass = pass && eq.is_equivalent;
        }
        cf["checks"]["pass"] = pass;
        methods["closed_form"] = cf;
        all_pass &= pass;
      }
    }

    report["methods"] = methods;
    report["pass"] = all_pass;
    io::write_json_file(out("report.json"), report);

    return {all_pass ? kExitOk : kExitVerificationFailure,
            all_pass ? "build: all checks passed"
                     : "build: verification failed, see " + out("report.json")};
  } catch (const RegimeError& e) {
    return {kExitRegimeError, std::string("regime error: ") + e.what()};
  } catch (const ValidationError& e) {
    return {kExitVerificationFailure, std::string("validation error: ") + e.what()};
  } catch (const IoError& e) {
    return {kExitIoError, std::string("io error: ") + e.what()};
  }
}

Outcome run_verify(const RunConfig& cfg, const std::string& q_path) {
  try {
    const ModelContext ctx = make_context(cfg);
    const ComplexMatrix q = io::matrix_from_json(io::read_json_file(q_path));
    if (q.rows() != ctx.sd.dim()) {
      throw ValidationError("verify: candidate metric dimension disagrees with the model");
    }
    const std::vector<ComplexVector> states = seeded_states(cfg, ctx, 3);
    verify::MetricReport mr;
    json checks;
    const bool pass = verify_metric(cfg, ctx, q, states, PositivityGate::NotIndefinite, mr, checks);
    json report = io::metric_report_to_json(mr);
    report["checks"] = checks;
    report["q_path"] = q_path;
    std::filesystem::create_directories(cfg.out_dir);
    io::write_json_file(cfg.out_dir + "/verify_report.json", report);
    std::ostringstream msg;
    msg << "verify: " << (pass ? "pass" : "fail")
        << " (selfadjointness " << io::format_double(mr.selfadjointness_residual)
        << ", positivity " << verify::to_string(mr.positivity_status)
        << ", drift " << io::format_double(mr.unitarity_drift) << ")";
    return {pass ? kExitOk : kExitVerificationFailure, msg.str()};
  } catch (const RegimeError& e) {
    return {kExitRegimeError, std::string("regime error: ") + e.what()};
  } catch (const ValidationError& e) {
    return {kExitVerificationFailure, std::string("validation error: ") + e.what()};
  } catch (const IoError& e) {
    return {kExitIoError, std::string("io error: ") + e.what()};
  }
}

Outcome run_evolve(const RunConfig& cfg, const std::string& state_spec, double t_max,
                   int steps, double drift_tol) {
  try {
    if (steps < 1 || !(t_max >= 0.0)) {
      throw ValidationError("evolve: need steps >= 1 and t_max >= 0");
    }
    const ModelContext ctx = make_context(cfg);

    ComplexMatrix q;
    if (cfg.model == Model::Lee && cfg.method == Method::ClosedForm) {
      q = lee::closed_form_metric(cfg.lee, *ctx.basis);
    } else if (cfg.model == Model::Lee && cfg.method == Method::Generator) {
      generator::Family family = lee::generator_family(cfg.lee, *ctx.basis, true);
      family.tol = cfg.tol;
      q = generator::build_q_generator(ctx.sys.H, family, ctx.sd);
    } else {
      q = build_q_spectral(ctx.sys, ctx.sd);
    }

    ComplexVector state;
    if (state_spec.rfind("seed:", 0) == 0) {
      const std::uint64_t k = std::stoull(state_spec.substr(5));
      state = cfg.model == Model::Lee
                  ? seeded_sector_state(ctx.sd, ctx.classes, cfg.seed + k)
                  : seeded_inspect_state(ctx.sd, cfg.seed + k);
    } else if (state_spec.rfind("file:", 0) == 0) {
      state = io::vector_from_json(io::read_json_file(state_spec.substr(5)));
      if (state.size() != ctx.sd.dim()) {
        throw ValidationError("evolve: state dimension disagrees with the model");
      }
    } else {
      throw ValidationError("evolve: state spec must be seed:K or file:PATH");
    }
    const ComplexVector projected = ctx.sd.completeness_projector() * state;
    if (projected.norm() <= cfg.tol * std::max(1.0, state.norm())) {
      throw ValidationError("evolve: state outside the physical subspace");
    }

    const std::vector<double> ts = time_grid(t_max, steps);
    std::vector<std::vector<double>> rows;
    rows.reserve(ts.size());
    Complex q0{};
    double drift = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const ComplexMatrix u = propagator(ctx.sd, ts[i]);
      const ComplexVector psi_t = u * state;
      const double dirac = psi_t.squaredNorm();
      const Complex qn = psi_t.dot(q * psi_t);
      if (i == 0) q0 = qn;
      if (std::abs(q0) > 0.0) drift = std::max(drift, std::abs(qn - q0) / std::abs(q0));
      rows.push_back({ts[i], dirac, qn.real()});
    }
    std::filesystem::create_directories(cfg.out_dir);
    io::write_csv(cfg.out_dir + "/evolve.csv", {"t", "dirac_norm", "q_norm"}, rows);

    const bool diagnostic = !ctx.sd.spectrum_real();
    std::ostringstream msg;
    msg << "evolve: q-norm drift " << io::format_double(drift);
    if (diagnostic) {
      msg << " (complex-spectrum diagnostic, no pass/fail)";
      return {kExitOk, msg.str()};
    }
    const bool pass = drift <= drift_tol;
    msg << (pass ? " <= " : " > ") << io::format_double(drift_tol);
    return {pass ? kExitOk : kExitVerificationFailure, msg.str()};
  } catch (const RegimeError& e) {
    return {kExitRegimeError, std::string("regime error: ") + e.what()};
  } catch (const ValidationError& e) {
    return {kExitVerificationFailure, std::string("validation error: ") + e.what()};
  } catch (const IoError& e) {
    return {kExitIoError, std::string("io error: ") + e.what()};
  }
}

}  // namespace qmetric::pipeline
