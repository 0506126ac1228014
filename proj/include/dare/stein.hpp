#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <optional>

#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"

namespace dare {

enum class SteinSign {
  Minus,  ///< X - A* X A = Q
  Plus,   ///< X + A* X A = Q
};

template <typename Real = double>
struct SteinProblem {
  Matrix<Real> A;
  HermitianMatrix<Real> Q;
  SteinSign sign = SteinSign::Minus;
};

/// S_A(X) = X - A* X A.
template <typename Real>
HermitianMatrix<Real> stein_apply(const Matrix<Real>& A, const HermitianMatrix<Real>& X) {
  detail::require_square(A, "stein_apply");
  detail::require_same_size(A.rows(), X.size(), "stein_apply");
  return symmetrize(X.matrix() - A.adjoint() * X.matrix() * A);
}

/// Left-hand side of the selected Stein equation evaluated at X.
template <typename Real>
HermitianMatrix<Real> stein_lhs(const Matrix<Real>& A, const HermitianMatrix<Real>& X,
                                SteinSign sign) {
  if (sign == SteinSign::Minus) return stein_apply(A, X);
  detail::require_square(A, "stein_lhs");
  detail::require_same_size(A.rows(), X.size(), "stein_lhs");
  return symmetrize(X.matrix() + A.adjoint() * X.matrix() * A);
}

/// Solves X - A* X A = Q (requires rho(A) < 1) or X + A* X A = Q (requires no
/// eigenvalue pair with lambda_i conj(lambda_j) = -1) through the n^2 x n^2
/// vectorized system (I -/+ A^T (x) A*) vec X = vec Q.
template <typename Real>
HermitianMatrix<Real> stein_solve(const SteinProblem<Real>& sp,
                                  Real cluster_tol = Real(kDefaultClusterTol)) {
  using Complex = std::complex<Real>;
  detail::require_square(sp.A, "stein_solve");
  detail::require_same_size(sp.A.rows(), sp.Q.size(), "stein_solve");
  const Eigen::Index n = sp.A.rows();

  const auto ev = eigenvalues(sp.A);
  if (sp.sign == SteinSign::Minus) {
    Real rho = 0;
    for (const auto& l : ev) rho = std::max(rho, std::abs(l));
    if (!(rho < Real(1))) {
      throw NoUniqueSolutionError("stein_solve: X - A*XA = Q needs rho(A) < 1, got rho = " +
                                  std::to_string(static_cast<double>(rho)));
    }
  } else {
    for (const auto& li : ev) {
      for (const auto& lj : ev) {
        if (std::abs(Complex(1) + li * std::conj(lj)) <= cluster_tol) {
          throw NoUniqueSolutionError(
              "stein_solve: X + A*XA = Q is singular (eigenvalue pair with lambda*conj(mu) = -1)");
        }
      }
    }
  }

  const Matrix<Real> AtKronAh = Eigen::kroneckerProduct(sp.A.transpose(), sp.A.adjoint()).eval();
  const Real s = sp.sign == SteinSign::Minus ? Real(-1) : Real(1);
  const Matrix<Real> K = Matrix<Real>::Identity(n * n, n * n) + s * AtKronAh;
  const Vector<Real> q = Eigen::Map<const Vector<Real>>(sp.Q.matrix().data(), n * n);

  Eigen::PartialPivLU<Matrix<Real>> lu(K);
  const Vector<Real> x = lu.solve(q);
  const Matrix<Real> X = Eigen::Map<const Matrix<Real>>(x.data(), n, n);
  return symmetrize(X);
}

/// Which form of the plus-sign precondition Q - A* Q A > 0 (strict) or >= 0 holds.
struct PlusSignCondition {
  bool strict = false;
  bool nonstrict = false;
};

template <typename Real>
PlusSignCondition plus_sign_condition(const Matrix<Real>& A, const HermitianMatrix<Real>& Q,
                                      Real tol = Real(1e-12)) {
  const HermitianMatrix<Real> D = stein_apply(A, Q);
  return {is_pd(D, tol), is_psd(D, tol)};
}

template <typename Real = double>
struct StabilityCertificate {
  StabilityClass stability = StabilityClass::Unstable;
  /// True when S_A(X0) >= 0 supplied the class; false when it fell back to the spectrum.
  bool certified = false;
  /// nullity(S_A(X0)) when certified: the certified count of unimodular eigenvalues.
  std::optional<Eigen::Index> unimodular_count;
};

inline constexpr double kSteinNullityCutoff = 1e-10;

/// Stability of A certified by a positive definite X0 through the sign of S_A(X0):
/// S_A(X0) > 0 gives asymptotic stability, S_A(X0) >= 0 gives Lyapunov stability
/// with nullity(S_A(X0)) unimodular eigenvalues. Otherwise the spectral classifier
/// decides and the certificate is marked as not certified.
template <typename Real>
StabilityCertificate<Real> certify_stability_via_stein(const Matrix<Real>& A,
                                                       const HermitianMatrix<Real>& X0,
                                                       Real tol = Real(1e-12),
                                                       Real cluster_tol = Real(kDefaultClusterTol)) {
  detail::require_square(A, "certify_stability_via_stein");
  detail::require_same_size(A.rows(), X0.size(), "certify_stability_via_stein");
  if (!is_pd(X0, tol)) {
    throw PreconditionError("certify_stability_via_stein: X0 must be positive definite");
  }
  const HermitianMatrix<Real> S = stein_apply(A, X0);
  StabilityCertificate<Real> out;
  if (is_psd(S, tol)) {
    const Eigen::Index k = nullity(S.matrix(), Real(kSteinNullityCutoff));
    out.certified = true;
    out.unimodular_count = k;
    out.stability = k == 0 ? StabilityClass::AsymptoticallyStable : StabilityClass::LyapunovStable;
    return out;
  }
  out.stability = classify_stability(A, cluster_tol);
  return out;
}

}  // namespace dare
