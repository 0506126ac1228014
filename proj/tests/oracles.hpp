#pragma once

// Reference computations written independently of the library code paths:
// explicit inverses instead of LU solves, series instead of Kronecker systems,
// closed-form roots instead of iterations.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXcd;

/// X_N of X_{k+1} = H + A* X_k (I + G X_k)^{-1} A from X_1 = H, with explicit inverses.
inline Mat fpi_iterate(const Mat& A, const Mat& G, const Mat& H, long N) {
  const Mat I = Mat::Identity(A.rows(), A.cols());
  Mat X = H;
  for (long k = 1; k < N; ++k) X = H + A.adjoint() * X * (I + G * X).inverse() * A;
  return X;
}

/// sum_{k>=0} (A*)^k Q A^k, truncated once terms fall below 1e-16 relative
/// (and at least K terms with rho^K <= 1e-12), capped at 10^4 terms.
inline Mat stein_series(const Mat& A, const Mat& Q) {
  const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
  const long min_terms = rho > 0 ? std::min(10000L, long(std::ceil(std::log(1e-12) / std::log(rho)))) : 1;
  Mat X = Mat::Zero(Q.rows(), Q.cols());
  Mat term = Q;
  for (long k = 0; k < 10000; ++k) {
    X += term;
    if (k >= min_terms && term.norm() <= 1e-16 * X.norm()) break;
    term = A.adjoint() * term * A;
  }
  return X;
}

/// Real roots of g x^2 + (1 - h g - |a|^2) x - h = 0, the fixed points of
/// x = h + |a|^2 x / (1 + g x); ascending.
inline std::vector<double> scalar_roots(std::complex<double> a, double g, double h) {
  const double a2 = std::norm(a);
  const double b = 1 - h * g - a2;
  if (g == 0) return {h / (1 - a2)};
  const double disc = b * b + 4 * g * h;
  if (disc < 0) return {};
  const double s = std::sqrt(disc);
  return {(-b - s) / (2 * g), (-b + s) / (2 * g)};
}

inline double rel(const Mat& x, const Mat& y) { return (x - y).norm() / std::max(1.0, y.norm()); }

/// Exact copy of the fixed 7x7 instance, entry by entry.
struct Example2Golden {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(7, 7);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(7, 7);
  Eigen::MatrixXd H = -3.5 * Eigen::MatrixXd::Identity(7, 7);

  Example2Golden() {
    A(0, 0) = -1;
    A(0, 1) = -0.5;
    A(1, 1) = -1;
    A(2, 2) = -1;
    A(2, 3) = -0.5;
    A(2, 4) = -0.125;
    A(3, 3) = -1;
    A(3, 4) = -0.5;
    A(4, 4) = -1;
    A(5, 5) = -2.0 / 3.0;
    A(6, 6) = -2.0 / 3.0;

    G(0, 0) = 0.03125;
    G(0, 1) = G(1, 0) = 0.125;
    G(1, 1) = 0.5;
    G(2, 2) = 0.001953125;
    G(2, 3) = G(3, 2) = 0.0078125;
    G(2, 4) = G(4, 2) = 0.03125;
    G(3, 3) = 0.03125;
    G(3, 4) = G(4, 3) = 0.125;
    G(4, 4) = 0.5;
    G(5, 5) = 2.0 / 9.0;
    G(6, 6) = 2.0 / 9.0;
  }
};

}  // namespace oracle
