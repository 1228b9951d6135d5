#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qmetric/fock.hpp"
#include "qmetric/generator.hpp"
#include "qmetric/spectral.hpp"
#include "qmetric/types.hpp"
#include "qmetric/verify.hpp"

namespace qmetric::io {

using json = nlohmann::json;

// Shared matrix format: {"dim": d, "entries": [[re, im], ...]} row-major.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// Vectors: {"dim": d, "entries": [[re, im], ...]}.
json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const json& j);

// Basis export: array of [n, n_V, n_N] triples.
json basis_to_json(const fock::Basis& basis);

json spectral_data_to_json(const SpectralData& sd);
SpectralData spectral_data_from_json(const json& j);

json family_to_json(const generator::Family& family);
generator::Family family_from_json(const json& j);

json metric_report_to_json(const verify::MetricReport& report);

// 17 significant digits; round-trips exactly.
std::string format_double(double x);

std::string read_text_file(const std::string& path);      // throws IoError
void write_text_file(const std::string& path, const std::string& contents);
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// CSV with a header row; every numeric cell through format_double.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace qmetric::io
