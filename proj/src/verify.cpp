#include <algorithm>
#include <cmath>
#include <string>

#include "dare/cli.hpp"
#include "dare/dare.hpp"

namespace dare::cli {

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kPencilTol = 1e-8;
constexpr int kMaxPower = 256;

CheckResult measured(std::string name, double value, double threshold, std::string note = {}) {
  return {std::move(name), value, threshold, value <= threshold, false, std::move(note)};
}

CheckResult skipped(std::string name, std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.skipped = true;
  c.note = std::move(note);
  return c;
}

CheckResult failed(std::string name, double threshold, std::string note) {
  return {std::move(name), std::nan(""), threshold, false, false, std::move(note)};
}

double rel(const Matrix<double>& x, const Matrix<double>& y) {
  return (x - y).norm() / std::max(1.0, y.norm());
}

}  // namespace

std::vector<CheckResult> verify_problem(const DareProblemd& p, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const Eigen::Index n = p.n();
  const bool psd = p.guarantees_checked();

  // Riccati operator: inverse form against the Woodbury form.
  try {
    const HermitianMatrixd X = random_psd_matrix(n, seed);
    out.push_back(measured("woodbury_agreement",
                           rel(riccati_apply(p, X).matrix(), riccati_apply_woodbury(p, X).matrix()),
                           kIdentityTol));
  } catch (const Error& e) {
    out.push_back(failed("woodbury_agreement", kIdentityTol, e.what()));
  }

  if (psd) {
    const HermitianMatrixd Y = random_psd_matrix(n, seed + 1);
    const HermitianMatrixd X = symmetrize(Y.matrix() + random_psd_matrix(n, seed + 2).matrix());
    const HermitianMatrixd RX = riccati_apply(p, X);
    const HermitianMatrixd D = symmetrize(RX.matrix() - riccati_apply(p, Y).matrix());
    const double scale = std::max(1.0, RX.norm());
    out.push_back(measured("order_preservation", std::max(0.0, -lambda_min(D)) / scale, kIdentityTol));
  } else {
    out.push_back(skipped("order_preservation", "G or H is not PSD"));
  }

  try {
    const CoefficientTriple<double> Y = seed_triple(p);
    const auto Z = random_psd_triple(n, seed + 3);
    const auto W = random_psd_triple(n, seed + 4);
    out.push_back(measured("associativity", triple_deviation(op_F(op_F(Y, Z), W), op_F(Y, op_F(Z, W))),
                           kIdentityTol));
  } catch (const Error& e) {
    out.push_back(failed("associativity", kIdentityTol, e.what()));
  }

  try {
    out.push_back(measured("discrete_flow", discrete_flow_check(p, 2, 3), kIdentityTol, "k=2, l=3"));
  } catch (const Error& e) {
    out.push_back(failed("discrete_flow", kIdentityTol, e.what()));
  }

  for (int r = 2; r <= 4; ++r) {
    const std::string name = "afpi_matches_fpi_r" + std::to_string(r);
    try {
      AcceleratedIteration<double> it(p, r);
      double worst = 0;
      for (long N = r; N <= kMaxPower; N *= r) {
        it.step();
        worst = std::max(worst, rel(it.current().H.matrix(), plain_iterate(p, N).matrix()));
      }
      out.push_back(measured(name, worst, kIdentityTol, "all r^m <= 256"));
    } catch (const Error& e) {
      out.push_back(failed(name, kIdentityTol, e.what()));
    }
  }

  SolveReport<double> fpi;
  bool have_fpi = false;
  try {
    fpi = fpi_solve(p);
    have_fpi = true;
  } catch (const Error& e) {
    out.push_back(failed("fpi_converged", 0, e.what()));
  }

  if (have_fpi) {
    if (psd) {
      out.push_back(measured("fpi_monotone", fpi.monotone_violations, 0, "Loewner violations"));
    } else {
      out.push_back(skipped("fpi_monotone", "G or H is not PSD"));
    }
    CheckResult conv = measured("fpi_converged", fpi.residual_history.back(), StoppingRule<double>{}.tol);
    conv.passed = fpi.converged;
    conv.note = to_string(fpi.termination);
    out.push_back(conv);

    if (fpi.converged) {
      try {
        const Matrix<double> T = closed_loop(p, fpi.solution);
        out.push_back(measured("pencil_invariance", pencil_check(p, fpi.solution, T), kPencilTol));

        const auto xc = existence_certificate(p);
        if (xc) {
          const double excess = lambda_max(fpi.solution) - *xc;
          out.push_back(measured("existence_bound", std::max(0.0, excess) / std::max(1.0, *xc), 1e-8,
                                 "lambda_max(X) <= x_c"));
        } else {
          out.push_back(skipped("existence_bound", "no scalar certificate (g = 0, ||A|| >= 1)"));
        }

        // A PD X0 with S_T(X0) = I exists exactly when rho(T) < 1; otherwise try X0 = I.
        const double rho = spectral_radius(T);
        HermitianMatrixd X0 = HermitianMatrixd::Identity(n);
        if (rho < 1.0 - kDefaultClusterTol) {
          X0 = stein_solve(SteinProblem<double>{T, HermitianMatrixd::Identity(n), SteinSign::Minus});
        }
        const auto cert = certify_stability_via_stein(T, X0);
        if (cert.certified) {
          const StabilityClass spectral = classify_stability(T);
          CheckResult c = measured("stein_certificate", 0, 0, to_string(cert.stability));
          c.passed = strength(spectral) >= strength(cert.stability);
          c.value = c.passed ? 0 : 1;
          out.push_back(c);
        } else {
          out.push_back(skipped("stein_certificate", "S_T(X0) is not PSD"));
        }
      } catch (const Error& e) {
        out.push_back(failed("pencil_invariance", kPencilTol, e.what()));
      }
    } else {
      out.push_back(skipped("pencil_invariance", "plain iteration did not converge"));
    }
  }

  return out;
}

}  // namespace dare::cli
