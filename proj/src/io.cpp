#include "qmetric/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qmetric/errors.hpp"

namespace qmetric::io {

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw IoError("expected [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw IoError("matrix export requires a square matrix");
  }
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back(complex_to_json(m(r, c)));
    }
  }
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("entries")) {
    throw IoError("matrix JSON needs 'dim' and 'entries'");
  }
  const Eigen::Index dim = j["dim"].get<Eigen::Index>();
  const json& entries = j["entries"];
  if (dim < 1 || !entries.is_array() || static_cast<Eigen::Index>(entries.size()) != dim * dim) {
    throw IoError("matrix JSON entry count disagrees with dim");
  }
  ComplexMatrix m(dim, dim);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      m(r, c) = complex_from_json(entries[k++]);
    }
  }
  return m;
}

json vector_to_json(const ComplexVector& v) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back(complex_to_json(v[i]));
  return json{{"dim", v.size()}, {"entries", std::move(entries)}};
}

ComplexVector vector_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("entries")) {
    throw IoError("vector JSON needs 'dim' and 'entries'");
  }
  const Eigen::Index dim = j["dim"].get<Eigen::Index>();
  const json& entries = j["entries"];
  if (dim < 1 || static_cast<Eigen::Index>(entries.size()) != dim) {
    throw IoError("vector JSON entry count disagrees with dim");
  }
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = complex_from_json(entries[i]);
  return v;
}

json basis_to_json(const fock::Basis& basis) {
  json j = json::array();
  for (const auto& s : basis.states()) {
    j.push_back(json::array({s.n, s.n_v, s.n_n}));
  }
  return j;
}

json spectral_data_to_json(const SpectralData& sd) {
  json evals = json::array();
  json c = json::array();
  for (int k = 0; k < sd.dim(); ++k) {
    evals.push_back(complex_to_json(sd.eigenvalues[k]));
    c.push_back(complex_to_json(sd.c[k]));
  }
  return json{{"eigenvalues", std::move(evals)},
              {"pairing", sd.pairing},
              {"in_spect", sd.in_spect},
              {"c", std::move(c)},
              {"right_vectors", matrix_to_json(sd.right_vectors)},
              {"dual_vectors", matrix_to_json(sd.dual_vectors)},
              {"tol", sd.tol}};
}

SpectralData spectral_data_from_json(const json& j) {
  SpectralData sd;
  const json& evals = j.at("eigenvalues");
  sd.eigenvalues.resize(evals.size());
  for (std::size_t k = 0; k < evals.size(); ++k) sd.eigenvalues[k] = complex_from_json(evals[k]);
  sd.pairing = j.at("pairing").get<std::vector<int>>();
  sd.in_spect = j.at("in_spect").get<std::vector<bool>>();
  const json& c = j.at("c");
  sd.c.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) sd.c[k] = complex_from_json(c[k]);
  sd.right_vectors = matrix_from_json(j.at("right_vectors"));
  sd.dual_vectors = matrix_from_json(j.at("dual_vectors"));
  sd.tol = j.value("tol", kDefaultTol);
  if (sd.right_vectors.rows() != sd.dim() || sd.dual_vectors.rows() != sd.dim() ||
      static_cast<int>(sd.pairing.size()) != sd.dim() ||
      static_cast<int>(sd.in_spect.size()) != sd.dim()) {
    throw IoError("spectral data JSON: inconsistent dimensions");
  }
  return sd;
}

json family_to_json(const generator::Family& family) {
  json entries = json::array();
  for (const auto& e : family.entries) {
    entries.push_back(json{{"E", complex_to_json(e.energy)}, {"sigma", matrix_to_json(e.sigma)}});
  }
  return json{{"entries", std::move(entries)},
              {"psi_ref", vector_to_json(family.psi_ref)},
              {"phi_ref", vector_to_json(family.phi_ref)},
              {"q0", matrix_to_json(family.q0)},
              {"tol", family.tol}};
}

generator::Family family_from_json(const json& j) {
  generator::Family family;
  for (const auto& e : j.at("entries")) {
    family.entries.push_back({complex_from_json(e.at("E")), matrix_from_json(e.at("sigma"))});
  }
  family.psi_ref = vector_from_json(j.at("psi_ref"));
  family.phi_ref = vector_from_json(j.at("phi_ref"));
  family.q0 = matrix_from_json(j.at("q0"));
  family.tol = j.value("tol", kDefaultTol);
  return family;
}

json metric_report_to_json(const verify::MetricReport& report) {
  json j{{"hermiticity_residual", report.hermiticity_residual},
         {"min_q_eigenvalue_on_Hprime", report.min_q_eigenvalue_on_hprime},
         {"selfadjointness_residual", report.selfadjointness_residual},
         {"unitarity_drift", report.unitarity_drift},
         {"positivity_status", verify::to_string(report.positivity_status)},
         {"Hprime_kernel_dim", report.hprime_kernel_dim}};
  if (!report.sector_scalars.empty()) {
    j["sector_scalars"] = report.sector_scalars;
  }
  return j;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed for " + path);
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace qmetric::io
