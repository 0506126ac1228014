#include "dare/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dare/errors.hpp"

namespace dare::io {

namespace {

constexpr double kHermitianTol = 1e-12;

std::string pointer(const std::string& base, Eigen::Index i) {
  return base + "/" + std::to_string(i);
}

Matrix<double> matrix_from_json(const json& doc, const std::string& key, Eigen::Index n,
                                const std::string& source) {
  const std::string loc = "/" + key;
  if (!doc.contains(key)) throw ParseError(source, loc, "missing field");
  const json& rows = doc.at(key);
  if (!rows.is_array()) throw ParseError(source, loc, "expected an array of rows");
  if (static_cast<Eigen::Index>(rows.size()) != n) {
    throw ParseError(source, loc,
                     "expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
  }
  Matrix<double> M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    const std::string rloc = pointer(loc, i);
    if (!row.is_array()) throw ParseError(source, rloc, "expected an array of entries");
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError(source, rloc,
                       "expected " + std::to_string(n) + " entries, got " + std::to_string(row.size()));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      const std::string eloc = pointer(rloc, j);
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ParseError(source, eloc, "expected a [re, im] pair of numbers");
      }
      M(i, j) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  return M;
}

void require_hermitian(const Matrix<double>& M, const std::string& key, const std::string& source) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      if (std::abs(M(i, j) - std::conj(M(j, i))) > kHermitianTol * scale) {
        throw ParseError(source, "/" + key + "/" + std::to_string(i) + "/" + std::to_string(j),
                         "matrix is not Hermitian");
      }
    }
  }
}

void require_field(const json& doc, const char* key, bool (json::*is_type)() const noexcept,
                   const char* type) {
  if (!doc.contains(key) || !(doc.at(key).*is_type)()) {
    throw ValidationError(std::string("report: field '") + key + "' missing or not " + type);
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json spectrum_to_json(const SpectrumSummary<double>& s) {
  json ev = json::array();
  for (const auto& l : s.eigenvalues) ev.push_back({l.real(), l.imag()});
  return {{"eigenvalues", ev},
          {"spectral_radius", s.spectral_radius},
          {"unimodular_indices", s.unimodular_indices},
          {"max_unimodular_index", s.max_unimodular_index}};
}

}  // namespace

json matrix_to_json(const Matrix<double>& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back({M(i, j).real(), M(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json problem_to_json(const DareProblemd& p) {
  return {{"n", p.n()},
          {"A", matrix_to_json(p.A)},
          {"G", matrix_to_json(p.G.matrix())},
          {"H", matrix_to_json(p.H.matrix())},
          {"flags", {{"g_psd", p.g_psd_checked}, {"h_psd", p.h_psd_checked}}}};
}

DareProblemd problem_from_json(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source, "", "expected a JSON object");
  if (!doc.contains("n") || !doc.at("n").is_number_integer() || doc.at("n").get<long>() < 1) {
    throw ParseError(source, "/n", "expected a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(doc.at("n").get<long>());
  const Matrix<double> A = matrix_from_json(doc, "A", n, source);
  const Matrix<double> G = matrix_from_json(doc, "G", n, source);
  const Matrix<double> H = matrix_from_json(doc, "H", n, source);
  require_hermitian(G, "G", source);
  require_hermitian(H, "H", source);

  DareProblemd p = make_problem<double>(A, symmetrize(G), symmetrize(H));
  if (doc.contains("flags")) {
    const json& flags = doc.at("flags");
    if (!flags.is_object()) throw ParseError(source, "/flags", "expected an object");
    for (const auto& [key, verified] : {std::pair{"g_psd", p.g_psd_checked},
                                        std::pair{"h_psd", p.h_psd_checked}}) {
      if (!flags.contains(key)) continue;
      const json& f = flags.at(key);
      if (!f.is_boolean()) throw ParseError(source, std::string("/flags/") + key, "expected a boolean");
      if (f.get<bool>() && !verified) {
        throw ParseError(source, std::string("/flags/") + key,
                         "flag claims positive semidefinite but the matrix is not");
      }
    }
  }
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void save_problem(const std::filesystem::path& path, const DareProblemd& p) {
  write_text(path, problem_to_json(p).dump(2) + "\n");
}

DareProblemd load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "", "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), "byte " + std::to_string(e.byte), "invalid JSON");
  }
  return problem_from_json(doc, path.string());
}

json report_to_json(const SolveReport<double>& rep, bool include_solution) {
  json doc = {{"converged", rep.converged},
              {"termination", to_string(rep.termination)},
              {"iterations", rep.iterations},
              {"order_used", rep.order_used},
              {"monotone_violations", rep.monotone_violations},
              {"guarantees_checked", rep.guarantees_checked},
              {"f_applications", rep.f_applications},
              {"riccati_applications", rep.riccati_applications},
              {"residual_history", rep.residual_history},
              {"delta_history", rep.delta_history},
              {"final_residual", rep.residual_history.empty() ? json(nullptr)
                                                              : json(rep.residual_history.back())},
              {"rate_estimate", optional_number(rep.rate_estimate)},
              {"order_estimate", optional_number(rep.order_estimate)},
              {"stability", rep.stability ? json(to_string(*rep.stability)) : json(nullptr)},
              {"closed_loop_spectrum",
               rep.closed_loop_spectrum ? spectrum_to_json(*rep.closed_loop_spectrum) : json(nullptr)}};
  if (include_solution) doc["solution"] = matrix_to_json(rep.solution.matrix());
  return doc;
}

void validate_report_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("report: expected a JSON object");
  require_field(doc, "converged", &json::is_boolean, "a boolean");
  require_field(doc, "termination", &json::is_string, "a string");
  require_field(doc, "iterations", &json::is_number_integer, "an integer");
  require_field(doc, "order_used", &json::is_number_integer, "an integer");
  require_field(doc, "monotone_violations", &json::is_number_integer, "an integer");
  require_field(doc, "residual_history", &json::is_array, "an array");
  require_field(doc, "delta_history", &json::is_array, "an array");
  const auto iterations = doc.at("iterations").get<long>();
  if (static_cast<long>(doc.at("residual_history").size()) != iterations) {
    throw ValidationError("report: residual_history length differs from iterations");
  }
  if (doc.at("delta_history").size() != doc.at("residual_history").size()) {
    throw ValidationError("report: delta_history length differs from residual_history");
  }
  for (const auto& v : doc.at("residual_history")) {
    if (!v.is_number() || v.get<double>() < 0) {
      throw ValidationError("report: residual_history holds a non-number or negative entry");
    }
  }
  if (doc.at("order_used").get<long>() < 1) throw ValidationError("report: order_used < 1");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string residual_csv(const SolveReport<double>& rep) {
  std::string out = "k,residual,delta_norm,elapsed_ms\n";
  for (std::size_t i = 0; i < rep.residual_history.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(rep.residual_history[i]);
    out += ',';
    out += format_double(rep.delta_history[i]);
    out += ',';
    out += format_double(i < rep.elapsed_ms.size() ? rep.elapsed_ms[i] : 0.0);
    out += '\n';
  }
  return out;
}

}  // namespace dare::io
