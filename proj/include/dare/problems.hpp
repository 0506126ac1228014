#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "dare/afpi.hpp"
#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"
#include "dare/random.hpp"
#include "dare/riccati.hpp"

namespace dare {

/// Parameters of the 5x5 family (A1 (+) A2, G1 (+) G2, H1 (+) H2).
///
/// The 3x3 block is fixed by (epsilon, g, a, b, c); the 2x2 block is random and
/// drawn from `seed`. When `b` is absent it is drawn from the same stream
/// (independent uniform real and imaginary parts), redrawn until a c >= |b|^2.
struct Example1Params {
  double epsilon = 0.5;
  double g = 2.0;
  double a = 4.0;
  double c = 1.0;
  std::optional<std::complex<double>> b;
  std::uint64_t seed = 0;
};

namespace detail {

inline void validate(const Example1Params& q) {
  if (!(q.epsilon > 0 && q.g > 0 && q.a > 0 && q.c > 0)) {
    throw ValidationError("example1: epsilon, g, a, c must be positive");
  }
  if (q.b && std::norm(*q.b) > q.a * q.c) {
    throw ValidationError("example1: need a*c >= |b|^2");
  }
}

inline std::complex<double> draw_b(const Example1Params& q, SplitMix64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::complex<double> b(rng.uniform(), rng.uniform());
    if (std::norm(b) <= q.a * q.c) return b;
  }
  throw ValidationError("example1: could not draw b with a*c >= |b|^2");
}

/// Real orthogonal factor of the QR decomposition of a uniform random n x n matrix,
/// with columns signed so that diag(R) > 0.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, SplitMix64& rng) {
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) M(i, j) = rng.uniform();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

/// Complex entries with independent uniform(0,1) real and imaginary parts.
inline Eigen::MatrixXcd complex_uniform(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  Eigen::MatrixXcd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.uniform();
      const double im = rng.uniform();
      M(i, j) = {re, im};
    }
  return M;
}

/// Complex entries with independent N(0, 1/2) real and imaginary parts.
inline Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  const double s = std::sqrt(0.5);
  Eigen::MatrixXcd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      M(i, j) = {s * re, s * im};
    }
  return M;
}

}  // namespace detail

/// The b actually used by example1 for these parameters.
inline std::complex<double> example1_b(const Example1Params& q) {
  detail::validate(q);
  if (q.b) return *q.b;
  SplitMix64 rng(q.seed);
  return detail::draw_b(q, rng);
}

template <typename Real = double>
DareProblem<Real> example1(const Example1Params& q) {
  using C = std::complex<double>;
  detail::validate(q);
  SplitMix64 rng(q.seed);
  const C b = q.b ? *q.b : detail::draw_b(q, rng);

  Eigen::MatrixXcd A1 = Eigen::MatrixXcd::Zero(3, 3);
  A1(0, 0) = q.epsilon;
  A1(0, 1) = 1.0;
  Eigen::MatrixXcd G1 = Eigen::MatrixXcd::Zero(3, 3);
  G1(0, 0) = q.g;
  Eigen::MatrixXcd H1 = Eigen::MatrixXcd::Zero(3, 3);
  H1(1, 1) = q.a;
  H1(1, 2) = b;
  H1(2, 1) = std::conj(b);
  H1(2, 2) = q.c;

  const Eigen::MatrixXcd A2 = detail::complex_uniform(2, 2, rng);
  const Eigen::MatrixXd U = detail::random_orthogonal(2, rng);
  const Eigen::MatrixXd V = detail::random_orthogonal(2, rng);
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform_open();
  const Eigen::MatrixXd G2 = U.transpose() * Eigen::Vector2d(2.0, 1.0).asDiagonal() * U;
  const Eigen::MatrixXd H2 = V.transpose() * Eigen::Vector2d(u1, u2).asDiagonal() * V;

  using M = Matrix<Real>;
  const M A = direct_sum<Real>(A1.template cast<std::complex<Real>>(), A2.template cast<std::complex<Real>>());
  const M G = direct_sum<Real>(G1.template cast<std::complex<Real>>(), G2.template cast<std::complex<Real>>());
  const M H = direct_sum<Real>(H1.template cast<std::complex<Real>>(), H2.template cast<std::complex<Real>>());
  return make_problem<Real>(A, symmetrize(G), symmetrize(H));
}

/// The fixed 7x7 instance with a negative definite H = -3.5 I.
template <typename Real = double>
DareProblem<Real> example2() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(7, 7);
  A.block(0, 0, 2, 2) << -1.0, -0.5, 0.0, -1.0;
  A.block(2, 2, 3, 3) << -1.0, -0.5, -0.125, 0.0, -1.0, -0.5, 0.0, 0.0, -1.0;
  A.block(5, 5, 2, 2) = (-2.0 / 3.0) * Eigen::Matrix2d::Identity();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(7, 7);
  G.block(0, 0, 2, 2) << 1.0 / 32, 1.0 / 8, 1.0 / 8, 1.0 / 2;
  G.block(2, 2, 3, 3) << 1.0 / 512, 1.0 / 128, 1.0 / 32, 1.0 / 128, 1.0 / 32, 1.0 / 8, 1.0 / 32,
      1.0 / 8, 1.0 / 2;
  G.block(5, 5, 2, 2) = (2.0 / 9.0) * Eigen::Matrix2d::Identity();

  const Eigen::MatrixXd H = -3.5 * Eigen::MatrixXd::Identity(7, 7);

  using C = std::complex<Real>;
  return make_problem<Real>(A.template cast<Real>().template cast<C>(), symmetrize(G.template cast<Real>()),
                            symmetrize(H.template cast<Real>()));
}

/// 1x1 problem x = h + |a|^2 x / (1 + g x).
template <typename Real = double>
DareProblem<Real> scalar_problem(std::complex<double> a, double g, double h) {
  if (!(g >= 0)) throw ValidationError("scalar_problem: G must be >= 0");
  Matrix<Real> A(1, 1), G(1, 1), H(1, 1);
  A(0, 0) = std::complex<Real>(a);
  G(0, 0) = Real(g);
  H(0, 0) = Real(h);
  return make_problem<Real>(A, symmetrize(G), symmetrize(H));
}

/// A complex Gaussian (rescaled so ||A||_2 <= spectral_cap when given), G = B* B, H = C* C.
template <typename Real = double>
DareProblem<Real> random_psd_problem(Eigen::Index n, std::uint64_t seed,
                                     std::optional<double> spectral_cap = std::nullopt) {
  if (n < 1) throw ValidationError("random_psd_problem: n must be >= 1");
  SplitMix64 rng(seed);
  Eigen::MatrixXcd A = detail::complex_gaussian(n, n, rng);
  const Eigen::MatrixXcd B = detail::complex_gaussian(n, n, rng);
  const Eigen::MatrixXcd C = detail::complex_gaussian(n, n, rng);
  if (spectral_cap) {
    const double s = Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
    if (s > *spectral_cap) A *= *spectral_cap / s;
  }
  using Cx = std::complex<Real>;
  return make_problem<Real>(A.cast<Cx>(), symmetrize((B.adjoint() * B).eval().cast<Cx>()),
                            symmetrize((C.adjoint() * C).eval().cast<Cx>()));
}

/// Random element of K_n: Gaussian first component, B* B and C* C for the others.
template <typename Real = double>
CoefficientTriple<Real> random_psd_triple(Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Eigen::MatrixXcd A = detail::complex_gaussian(n, n, rng);
  const Eigen::MatrixXcd B = detail::complex_gaussian(n, n, rng);
  const Eigen::MatrixXcd C = detail::complex_gaussian(n, n, rng);
  using Cx = std::complex<Real>;
  return {A.cast<Cx>(), symmetrize((B.adjoint() * B).eval().cast<Cx>()),
          symmetrize((C.adjoint() * C).eval().cast<Cx>())};
}

/// Random PSD matrix B* B of size n.
template <typename Real = double>
HermitianMatrix<Real> random_psd_matrix(Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Eigen::MatrixXcd B = detail::complex_gaussian(n, n, rng);
  return symmetrize((B.adjoint() * B).eval().cast<std::complex<Real>>());
}

}  // namespace dare
