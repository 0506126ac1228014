#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"

namespace dare {

/// Tolerance used when flagging G and H as positive semidefinite.
inline constexpr double kPsdCheckTol = 1e-12;

/// Coefficients of X = H + A* X (I + G X)^{-1} A.
///
/// G is expected PSD. H may be indefinite; the flags record what was verified,
/// and solvers report PSD-dependent guarantees as unchecked when a flag is unset.
template <typename Real = double>
struct DareProblem {
  Matrix<Real> A;
  HermitianMatrix<Real> G;
  HermitianMatrix<Real> H;
  bool g_psd_checked = false;
  bool h_psd_checked = false;

  Eigen::Index n() const { return A.rows(); }
  bool guarantees_checked() const { return g_psd_checked && h_psd_checked; }
};

using DareProblemd = DareProblem<double>;

/// Validates shapes and records which of G, H pass is_psd.
template <typename Real>
DareProblem<Real> make_problem(Matrix<Real> A, HermitianMatrix<Real> G, HermitianMatrix<Real> H,
                               Real psd_tol = Real(kPsdCheckTol)) {
  detail::require_square(A, "make_problem(A)");
  detail::require_same_size(A.rows(), G.size(), "make_problem(G)");
  detail::require_same_size(A.rows(), H.size(), "make_problem(H)");
  if (A.rows() == 0) throw DimensionError("make_problem: empty problem");
  DareProblem<Real> p;
  p.g_psd_checked = is_psd(G, psd_tol);
  p.h_psd_checked = is_psd(H, psd_tol);
  p.A = std::move(A);
  p.G = std::move(G);
  p.H = std::move(H);
  return p;
}

namespace detail {

/// LU of a factor that must be invertible; throws naming the factor otherwise.
template <typename Real>
Eigen::PartialPivLU<Matrix<Real>> invertible_lu(const Matrix<Real>& F, const char* name) {
  Eigen::PartialPivLU<Matrix<Real>> lu(F);
  const Real rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<Real>::epsilon() * Real(F.rows())) || !std::isfinite(rcond)) {
    throw SingularityError(std::string(name) + " is numerically singular (rcond = " +
                           std::to_string(static_cast<double>(rcond)) + ")");
  }
  return lu;
}

template <typename Real>
void require_match(const DareProblem<Real>& p, const HermitianMatrix<Real>& X, const char* what) {
  require_same_size(p.n(), X.size(), what);
}

}  // namespace detail

/// R_d(X) = H + A* X (I + G X)^{-1} A.
template <typename Real>
HermitianMatrix<Real> riccati_apply(const DareProblem<Real>& p, const HermitianMatrix<Real>& X) {
  detail::require_match(p, X, "riccati_apply");
  const Eigen::Index n = p.n();
  const Matrix<Real> IGX = Matrix<Real>::Identity(n, n) + p.G.matrix() * X.matrix();
  const auto lu = detail::invertible_lu(IGX, "I + G X");
  const Matrix<Real> T = lu.solve(p.A);
  return symmetrize(p.H.matrix() + p.A.adjoint() * X.matrix() * T);
}

/// R_d(X) through X (I + G X)^{-1} = X - X G (I + X G)^{-1} X.
template <typename Real>
HermitianMatrix<Real> riccati_apply_woodbury(const DareProblem<Real>& p,
                                             const HermitianMatrix<Real>& X) {
  detail::require_match(p, X, "riccati_apply_woodbury");
  const Eigen::Index n = p.n();
  const Matrix<Real> IXG = Matrix<Real>::Identity(n, n) + X.matrix() * p.G.matrix();
  const auto lu = detail::invertible_lu(IXG, "I + X G");
  const Matrix<Real> inner = X.matrix() - X.matrix() * p.G.matrix() * lu.solve(X.matrix());
  return symmetrize(p.H.matrix() + p.A.adjoint() * inner * p.A);
}

/// Closed-loop matrix T_X = (I + G X)^{-1} A.
template <typename Real>
Matrix<Real> closed_loop(const DareProblem<Real>& p, const HermitianMatrix<Real>& X) {
  detail::require_match(p, X, "closed_loop");
  const Eigen::Index n = p.n();
  const Matrix<Real> IGX = Matrix<Real>::Identity(n, n) + p.G.matrix() * X.matrix();
  return detail::invertible_lu(IGX, "I + G X").solve(p.A);
}

/// ||X - R_d(X)||_F / max(1, ||X||_F).
template <typename Real>
Real residual(const DareProblem<Real>& p, const HermitianMatrix<Real>& X) {
  const HermitianMatrix<Real> RX = riccati_apply(p, X);
  return (X.matrix() - RX.matrix()).norm() / std::max(Real(1), X.norm());
}

template <typename Real = double>
struct PencilPair {
  Matrix<Real> M;  ///< [[A, 0], [-H, I]]
  Matrix<Real> L;  ///< [[I, G], [0, A*]]
};

/// The pencil M - lambda L whose deflating subspaces [I; X] carry the DARE solutions,
/// with M [I; X] = L [I; X] T_X exactly when X solves the equation.
template <typename Real>
PencilPair<Real> make_pencil(const DareProblem<Real>& p) {
  const Eigen::Index n = p.n();
  const Matrix<Real> I = Matrix<Real>::Identity(n, n);
  const Matrix<Real> Z = Matrix<Real>::Zero(n, n);
  PencilPair<Real> out;
  out.M.resize(2 * n, 2 * n);
  out.L.resize(2 * n, 2 * n);
  out.M << p.A, Z, -p.H.matrix(), I;
  out.L << I, p.G.matrix(), Z, p.A.adjoint();
  return out;
}

/// ||M [I; X] - L [I; X] T||_F / max(1, ||[I; X]||_F).
template <typename Real>
Real pencil_check(const DareProblem<Real>& p, const HermitianMatrix<Real>& X,
                  const Matrix<Real>& T) {
  detail::require_match(p, X, "pencil_check");
  detail::require_same_size(p.n(), T.rows(), "pencil_check(T rows)");
  detail::require_same_size(p.n(), T.cols(), "pencil_check(T cols)");
  const Eigen::Index n = p.n();
  const PencilPair<Real> pencil = make_pencil(p);
  Matrix<Real> basis(2 * n, n);
  basis << Matrix<Real>::Identity(n, n), X.matrix();
  const Matrix<Real> gap = pencil.M * basis - pencil.L * basis * T;
  return gap.norm() / std::max(Real(1), basis.norm());
}

/// Scalar x_c >= 0 with x_c I >= R_d(x_c I), from
///   g x^2 + (1 - a - h g) x - h >= 0,  h = lambda_max(H), g = lambda_min(G), a = ||A||_2^2.
/// Absent when g == 0 and a >= 1. The returned bound is post-verified.
template <typename Real>
std::optional<Real> existence_certificate(const DareProblem<Real>& p,
                                          Real verify_tol = Real(1e-10)) {
  const Real h = lambda_max(p.H);
  const Real g_raw = lambda_min(p.G);
  const RealVector<Real> sv = singular_values(p.A);
  const Real a = sv.size() ? sv(0) * sv(0) : Real(0);

  // lambda_min of a PSD G computed in floating point can be a tiny negative
  // (or positive) number; treat |g| below the PSD tolerance as an exact zero.
  const Real g_zero = Real(kPsdCheckTol) * std::max(Real(1), p.G.norm());
  const Real g = g_raw <= g_zero ? Real(0) : g_raw;

  Real xc;
  if (g > Real(0)) {
    const Real b = Real(1) - a - h * g;
    const Real disc = b * b + Real(4) * g * h;
    const Real root = (-b + std::sqrt(std::max(disc, Real(0)))) / (Real(2) * g);
    xc = std::max(root, Real(0));
  } else {
    if (a >= Real(1)) return std::nullopt;
    xc = std::max(h / (Real(1) - a), Real(0));
  }

  const Eigen::Index n = p.n();
  const HermitianMatrix<Real> bound = symmetrize(xc * Matrix<Real>::Identity(n, n));
  if (!loewner_geq(bound, riccati_apply(p, bound), verify_tol)) {
    throw InternalConsistencyError("existence_certificate: x_c I >= R_d(x_c I) failed for x_c = " +
                                   std::to_string(static_cast<double>(xc)));
  }
  return xc;
}

}  // namespace dare
