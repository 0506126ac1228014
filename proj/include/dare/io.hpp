#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>

#include "dare/afpi.hpp"
#include "dare/analysis.hpp"
#include "dare/riccati.hpp"

namespace dare::io {

using nlohmann::json;

/// Problem document:
///   {"n": n, "A": [[[re, im], ...], ...], "G": ..., "H": ...,
///    "flags": {"g_psd": bool, "h_psd": bool}}
/// Complex entries are [re, im] pairs, rows outermost.
json problem_to_json(const DareProblemd& p);

/// Validates the document and rebuilds the problem. G and H must be Hermitian
/// (to 1e-12 relative); flags claiming PSD must hold. Errors carry a
/// JSON-pointer-style location such as "/G/1/0".
DareProblemd problem_from_json(const json& doc, const std::string& source = "<json>");

void save_problem(const std::filesystem::path& path, const DareProblemd& p);
DareProblemd load_problem(const std::filesystem::path& path);

json matrix_to_json(const Matrix<double>& M);

/// Solver report as JSON (histories included, solution matrix optional).
json report_to_json(const SolveReport<double>& rep, bool include_solution = true);

/// Throws ValidationError naming the first missing or mistyped field.
void validate_report_json(const json& doc);

/// CSV with header "k,residual,delta_norm,elapsed_ms", one row per iteration.
std::string residual_csv(const SolveReport<double>& rep);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dare::io
