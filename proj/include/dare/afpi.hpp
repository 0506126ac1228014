#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"
#include "dare/rates.hpp"
#include "dare/riccati.hpp"

namespace dare {

/// Element (A_k, G_k, H_k) of C^{n x n} x N_n x N_n carried by the semigroup iteration.
template <typename Real = double>
struct CoefficientTriple {
  Matrix<Real> A;
  HermitianMatrix<Real> G;
  HermitianMatrix<Real> H;

  Eigen::Index n() const { return A.rows(); }
};

/// X_1 = (A, G, H).
template <typename Real>
CoefficientTriple<Real> seed_triple(const DareProblem<Real>& p) {
  return {p.A, p.G, p.H};
}

/// The associative binary operator
///
///   F(Y, Z) = ( Z1 D Y1,  Z2 + Z1 D Y2 Z1*,  Y3 + Y1* Z3 D Y1 ),  D = (I + Y2 Z3)^{-1}.
///
/// X_{k+1} = F(X_k, X_1) generates the coefficients of the k-fold composition of
/// R_d, and X_{k+l} = F(X_k, X_l).
template <typename Real>
CoefficientTriple<Real> op_F(const CoefficientTriple<Real>& Y, const CoefficientTriple<Real>& Z) {
  const Eigen::Index n = Y.n();
  detail::require_same_size(n, Z.n(), "op_F");
  const Matrix<Real> IYZ = Matrix<Real>::Identity(n, n) + Y.G.matrix() * Z.H.matrix();
  const auto lu = detail::invertible_lu(IYZ, "I + Y2 Z3");
  const Matrix<Real> DY1 = lu.solve(Y.A);
  const Matrix<Real> DY2 = lu.solve(Y.G.matrix());

  CoefficientTriple<Real> out;
  out.A = Z.A * DY1;
  out.G = symmetrize(Z.G.matrix() + Z.A * DY2 * Z.A.adjoint());
  out.H = symmetrize(Y.H.matrix() + Y.A.adjoint() * Z.H.matrix() * DY1);
  return out;
}

/// max over the three components of ||a_i - b_i||_F / max(1, ||b_i||_F).
template <typename Real>
Real triple_deviation(const CoefficientTriple<Real>& a, const CoefficientTriple<Real>& b) {
  auto rel = [](const Matrix<Real>& x, const Matrix<Real>& y) {
    return (x - y).norm() / std::max(Real(1), y.norm());
  };
  return std::max({rel(a.A, b.A), rel(a.G.matrix(), b.G.matrix()), rel(a.H.matrix(), b.H.matrix())});
}

inline constexpr double kOverflowGuard = 1e150;

namespace detail {

template <typename Real>
void guard_finite(const CoefficientTriple<Real>& t, const char* where) {
  const Real big = std::max({t.A.norm(), t.G.norm(), t.H.norm()});
  if (!std::isfinite(big) || big > Real(kOverflowGuard)) {
    throw DivergenceError(std::string(where) + ": coefficient norm " +
                          std::to_string(static_cast<double>(big)) + " exceeds the overflow guard");
  }
}

}  // namespace detail

/// X_k = F(X_{k-1}, X_1), k >= 1.
template <typename Real>
CoefficientTriple<Real> triple_power(const DareProblem<Real>& p, int k) {
  if (k < 1) throw PreconditionError("triple_power: k must be >= 1");
  const CoefficientTriple<Real> x1 = seed_triple(p);
  CoefficientTriple<Real> x = x1;
  for (int j = 1; j < k; ++j) x = op_F(x, x1);
  return x;
}

/// Relative deviation of F(X_k, X_l) from X_{k+l}, both built by the base recursion.
template <typename Real>
Real discrete_flow_check(const DareProblem<Real>& p, int k, int l) {
  if (k < 1 || l < 1) throw PreconditionError("discrete_flow_check: k and l must be >= 1");
  return triple_deviation(op_F(triple_power(p, k), triple_power(p, l)), triple_power(p, k + l));
}

template <typename Real = double>
struct StoppingRule {
  Real tol = Real(1e-12);
  int max_iter = 100;
  /// Stop when the best residual of the last `stagnation_window` iterations is not
  /// below 0.99 times the best residual before them.
  int stagnation_window = 10;
  bool record_timing = false;

  static StoppingRule accelerated() { return {}; }
  static StoppingRule plain() {
    StoppingRule s;
    s.max_iter = 1000;
    return s;
  }
};

enum class Termination { Converged, MaxIterations, Stagnation };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::Stagnation:
      return "stagnation";
  }
  return "max_iterations";
}

/// Tolerance of the Loewner comparison X_{k} >= X_{k-1} counted by the solvers.
inline constexpr double kMonotoneTol = 1e-9;
inline constexpr double kStagnationFactor = 0.99;

template <typename Real = double>
struct SolveReport {
  HermitianMatrix<Real> solution;
  bool converged = false;
  Termination termination = Termination::MaxIterations;
  int iterations = 0;
  /// residual_history[k-1] is the relative residual of iterate k against the original problem.
  std::vector<Real> residual_history;
  /// delta_history[k-1] = ||X_k - X_{k-1}||_F with X_0 = 0.
  std::vector<Real> delta_history;
  /// Wall-clock milliseconds since the start, per iteration (zeros unless timing is recorded).
  std::vector<double> elapsed_ms;
  std::optional<SpectrumSummary<Real>> closed_loop_spectrum;
  std::optional<StabilityClass> stability;
  std::optional<Real> rate_estimate;
  std::optional<Real> order_estimate;
  /// 1 for the plain fixed-point iteration, r for the accelerated one.
  int order_used = 1;
  int monotone_violations = 0;
  /// False when G or H failed the PSD check, so monotonicity and minimality are not guaranteed.
  bool guarantees_checked = false;
  long f_applications = 0;
  long riccati_applications = 0;

  bool operator==(const SolveReport&) const = default;
};

/// Plain iteration X_{k+1} = R_d(X_k) from X_1 = H.
template <typename Real = double>
class FixedPointIteration {
 public:
  explicit FixedPointIteration(const DareProblem<Real>& p) : p_(p), x_(p.H) {}

  const HermitianMatrix<Real>& current() const { return x_; }
  /// Index k of the current iterate X_k.
  int index() const { return k_; }

  void step() {
    x_ = riccati_apply(p_, x_);
    ++k_;
  }
  /// Advance using an already evaluated R_d(X_k).
  void step_to(HermitianMatrix<Real> next) {
    x_ = std::move(next);
    ++k_;
  }

 private:
  const DareProblem<Real>& p_;
  HermitianMatrix<Real> x_;
  int k_ = 1;
};

/// Accelerated iteration of order r: each update runs the ladder
/// L_1 = X^, L_{l+1} = F(X^, L_l) for l = 1..r-2, then X^ <- F(X^, L_{r-1}).
/// After m updates the H component equals the plain iterate X_{r^m}.
template <typename Real = double>
class AcceleratedIteration {
 public:
  AcceleratedIteration(const DareProblem<Real>& p, int r) : hat_(seed_triple(p)), r_(r) {
    if (r < 2) throw PreconditionError("AcceleratedIteration: order r must be >= 2");
  }

  const CoefficientTriple<Real>& current() const { return hat_; }
  int updates() const { return updates_; }
  int order() const { return r_; }
  long f_applications() const { return f_count_; }

  void step() {
    CoefficientTriple<Real> ladder = hat_;
    for (int l = 1; l <= r_ - 2; ++l) {
      ladder = op_F(hat_, ladder);
      ++f_count_;
    }
    hat_ = op_F(hat_, ladder);
    ++f_count_;
    ++updates_;
    detail::guard_finite(hat_, "AcceleratedIteration");
  }

 private:
  CoefficientTriple<Real> hat_;
  int r_;
  int updates_ = 0;
  long f_count_ = 0;
};

/// X_N of the plain iteration (X_1 = H), N >= 1.
template <typename Real>
HermitianMatrix<Real> plain_iterate(const DareProblem<Real>& p, long N) {
  if (N < 1) throw PreconditionError("plain_iterate: N must be >= 1");
  HermitianMatrix<Real> x = p.H;
  for (long k = 1; k < N; ++k) x = riccati_apply(p, x);
  return x;
}

namespace detail {

template <typename Real>
bool stagnated(const std::vector<Real>& res, int window) {
  const auto k = static_cast<std::ptrdiff_t>(res.size());
  if (window < 1 || k <= window) return false;
  const Real before = *std::min_element(res.begin(), res.end() - window);
  const Real recent = *std::min_element(res.end() - window, res.end());
  return !(recent < Real(kStagnationFactor) * before);
}

/// Shared driver. `advance(RX)` moves to the next iterate given RX = R_d(current).
template <typename Real, typename Current, typename Advance>
SolveReport<Real> drive(const DareProblem<Real>& p, const StoppingRule<Real>& stop, int order,
                        Current current, Advance advance) {
  if (!(stop.tol > Real(0)) || stop.max_iter < 1) {
    throw PreconditionError("StoppingRule: tol must be > 0 and max_iter >= 1");
  }
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();

  SolveReport<Real> rep;
  rep.order_used = order;
  rep.guarantees_checked = p.guarantees_checked();
  HermitianMatrix<Real> prev = HermitianMatrix<Real>::Zero(p.n());

  for (int k = 1;; ++k) {
    const HermitianMatrix<Real>& x = current();
    const Real xnorm = x.norm();
    if (!std::isfinite(xnorm) || xnorm > Real(kOverflowGuard)) {
      throw DivergenceError("iterate " + std::to_string(k) + " has norm " +
                            std::to_string(static_cast<double>(xnorm)));
    }
    HermitianMatrix<Real> rx = riccati_apply(p, x);
    ++rep.riccati_applications;
    const Real res = (x.matrix() - rx.matrix()).norm() / std::max(Real(1), xnorm);
    if (!std::isfinite(res)) {
      throw DivergenceError("residual of iterate " + std::to_string(k) + " is not finite");
    }
    rep.residual_history.push_back(res);
    rep.delta_history.push_back((x.matrix() - prev.matrix()).norm());
    rep.elapsed_ms.push_back(
        stop.record_timing
            ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count()
            : 0.0);
    if (!loewner_geq(x, prev, Real(kMonotoneTol))) ++rep.monotone_violations;
    rep.iterations = k;

    if (res <= stop.tol) {
      rep.converged = true;
      rep.termination = Termination::Converged;
      break;
    }
    if (stagnated(rep.residual_history, stop.stagnation_window)) {
      rep.termination = Termination::Stagnation;
      break;
    }
    if (k >= stop.max_iter) {
      rep.termination = Termination::MaxIterations;
      break;
    }
    prev = x;
    advance(std::move(rx));
  }

  rep.solution = current();
  try {
    rep.closed_loop_spectrum = spectrum(closed_loop(p, rep.solution));
    rep.stability = classify_stability(*rep.closed_loop_spectrum);
  } catch (const SingularityError&) {
  } catch (const NumericalError&) {
  }
  if (rep.residual_history.size() >= 4) {
    RateOptions<Real> opt;
    opt.step = order;
    const RateReport<Real> rates = estimate_rates<Real>(rep.residual_history, std::nullopt, opt);
    rep.rate_estimate = rates.r_linear_rate;
    rep.order_estimate = rates.r_superlinear_order;
  }
  return rep;
}

}  // namespace detail

/// Plain fixed-point iteration from X_1 = H. Iteration k reports X_k.
template <typename Real>
SolveReport<Real> fpi_solve(const DareProblem<Real>& p,
                            const StoppingRule<Real>& stop = StoppingRule<Real>::plain()) {
  FixedPointIteration<Real> it(p);
  return detail::drive(
      p, stop, 1, [&]() -> const HermitianMatrix<Real>& { return it.current(); },
      [&](HermitianMatrix<Real> rx) { it.step_to(std::move(rx)); });
}

/// Accelerated fixed-point iteration of order r >= 2. Iteration k reports the H
/// component of X^_k = X_{r^(k-1)}; residuals are measured against the original problem.
template <typename Real>
SolveReport<Real> afpi_solve(const DareProblem<Real>& p, int r,
                             const StoppingRule<Real>& stop = StoppingRule<Real>::accelerated()) {
  AcceleratedIteration<Real> it(p, r);
  SolveReport<Real> rep = detail::drive(
      p, stop, r, [&]() -> const HermitianMatrix<Real>& { return it.current().H; },
      [&](HermitianMatrix<Real>) { it.step(); });
  rep.f_applications = it.f_applications();
  return rep;
}

/// Structure-preserving doubling: the accelerated iteration with r = 2.
template <typename Real>
SolveReport<Real> sda_solve(const DareProblem<Real>& p,
                            const StoppingRule<Real>& stop = StoppingRule<Real>::accelerated()) {
  return afpi_solve(p, 2, stop);
}

/// Order 1 selects the plain iteration, r >= 2 the accelerated one.
template <typename Real>
SolveReport<Real> solve_with_order(const DareProblem<Real>& p, int order,
                                   const StoppingRule<Real>& stop) {
  if (order < 1) throw PreconditionError("solve_with_order: order must be >= 1");
  return order == 1 ? fpi_solve(p, stop) : afpi_solve(p, order, stop);
}

}  // namespace dare
