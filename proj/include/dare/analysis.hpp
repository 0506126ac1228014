#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dare/afpi.hpp"
#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"
#include "dare/rates.hpp"
#include "dare/riccati.hpp"

namespace dare {

/// Residual a candidate must reach before its closed loop is used to predict rates.
inline constexpr double kRateBoundResidualTol = 1e-8;

/// max{|lambda|^2 : lambda in sigma(T_X*), |lambda| < 1 - cluster_tol}, 0 when empty.
/// This bounds the R-linear rate of the plain iteration towards X*.
template <typename Real>
Real rate_bound_from_solution(const DareProblem<Real>& p, const HermitianMatrix<Real>& X_star,
                              Real cluster_tol = Real(kDefaultClusterTol)) {
  const Real res = residual(p, X_star);
  if (!(res <= Real(kRateBoundResidualTol))) {
    throw PreconditionError("rate_bound_from_solution: X* is not a solution (residual " +
                            std::to_string(static_cast<double>(res)) + ")");
  }
  Real bound = 0;
  for (const auto& l : eigenvalues(closed_loop(p, X_star))) {
    const Real m = std::abs(l);
    if (m < Real(1) - cluster_tol) bound = std::max(bound, m * m);
  }
  return bound;
}

enum class MinimalityEvidence { FromMonotoneFPI, Unknown };
enum class Stabilizing { Stabilizing, AlmostStabilizing, NotStabilizing };

inline const char* to_string(MinimalityEvidence m) {
  return m == MinimalityEvidence::FromMonotoneFPI ? "FromMonotoneFPI" : "Unknown";
}

inline const char* to_string(Stabilizing s) {
  switch (s) {
    case Stabilizing::Stabilizing:
      return "Stabilizing";
    case Stabilizing::AlmostStabilizing:
      return "AlmostStabilizing";
    case Stabilizing::NotStabilizing:
      return "NotStabilizing";
  }
  return "NotStabilizing";
}

template <typename Real = double>
struct SolutionClassification {
  bool is_solution = false;
  Real residual = 0;
  MinimalityEvidence minimality_evidence = MinimalityEvidence::Unknown;
  Stabilizing stabilizing = Stabilizing::NotStabilizing;
  /// rho(T_X); absent when I + G X is singular.
  std::optional<Real> closed_loop_radius;
};

template <typename Real = double>
struct ClassifyOptions {
  Real residual_tol = Real(1e-8);
  Real cluster_tol = Real(kDefaultClusterTol);
};

/// Classifies X as a solution and by the location of sigma(T_X). Minimality is
/// provenance-based: `fpi_provenance` states that X came from the monotone
/// iteration started at X_1 = H with zero Loewner violations.
template <typename Real>
SolutionClassification<Real> classify_solution(const DareProblem<Real>& p,
                                               const HermitianMatrix<Real>& X, bool fpi_provenance,
                                               const ClassifyOptions<Real>& opt = {}) {
  SolutionClassification<Real> out;
  try {
    out.residual = residual(p, X);
    out.is_solution = out.residual <= opt.residual_tol;
    const Real rho = spectral_radius(closed_loop(p, X));
    out.closed_loop_radius = rho;
    if (rho < Real(1) - opt.cluster_tol) {
      out.stabilizing = Stabilizing::Stabilizing;
    } else if (rho <= Real(1) + opt.cluster_tol) {
      out.stabilizing = Stabilizing::AlmostStabilizing;
    }
  } catch (const SingularityError&) {
    out.is_solution = false;
  }
  out.minimality_evidence = fpi_provenance && out.is_solution ? MinimalityEvidence::FromMonotoneFPI
                                                              : MinimalityEvidence::Unknown;
  return out;
}

/// Provenance from a solver report: converged, PSD data, and no monotonicity violations.
template <typename Real>
bool monotone_provenance(const SolveReport<Real>& rep) {
  return rep.converged && rep.guarantees_checked && rep.monotone_violations == 0;
}

template <typename Real>
SolutionClassification<Real> classify_solution(const DareProblem<Real>& p,
                                               const SolveReport<Real>& rep,
                                               const ClassifyOptions<Real>& opt = {}) {
  return classify_solution(p, rep.solution, monotone_provenance(rep), opt);
}

}  // namespace dare
