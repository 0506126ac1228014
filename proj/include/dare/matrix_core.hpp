#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dare/errors.hpp"

namespace dare {

template <typename Real>
using Matrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using Vector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Real scalar type underlying an Eigen expression (double for MatrixXcd and MatrixXd).
template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

/// Default tolerance for deciding |lambda| == 1 and for eigenvalue clustering.
inline constexpr double kDefaultClusterTol = 1e-8;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

template <typename Real = double>
class HermitianMatrix;

/// Returns (M + M*)/2 with exactly Hermitian storage: the strict lower triangle is
/// the conjugate of the upper one and the diagonal is real.
template <typename Derived>
HermitianMatrix<RealOf<Derived>> symmetrize(const Eigen::MatrixBase<Derived>& M);

/// Dense complex square matrix whose storage is exactly Hermitian.
///
/// The only way to obtain one from arbitrary data is `symmetrize`, so the
/// invariant entries(i,j) == conj(entries(j,i)) holds bit-for-bit.
template <typename Real>
class HermitianMatrix {
 public:
  using Scalar = std::complex<Real>;
  using MatrixType = Matrix<Real>;

  HermitianMatrix() = default;

  static HermitianMatrix Zero(Eigen::Index n) { return HermitianMatrix(MatrixType::Zero(n, n)); }
  static HermitianMatrix Identity(Eigen::Index n) {
    return HermitianMatrix(MatrixType::Identity(n, n));
  }

  const MatrixType& matrix() const { return m_; }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  Eigen::Index size() const { return m_.rows(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Real norm() const { return m_.norm(); }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
  }

 private:
  template <typename Derived>
  friend HermitianMatrix<RealOf<Derived>> symmetrize(const Eigen::MatrixBase<Derived>& M);

  explicit HermitianMatrix(MatrixType m) : m_(std::move(m)) {}

  MatrixType m_;
};

using HermitianMatrixd = HermitianMatrix<double>;

template <typename Derived>
HermitianMatrix<RealOf<Derived>> symmetrize(const Eigen::MatrixBase<Derived>& M) {
  using Real = RealOf<Derived>;
  detail::require_square(M, "symmetrize");
  const Matrix<Real> src = M.template cast<std::complex<Real>>();
  const Eigen::Index n = src.rows();
  Matrix<Real> out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = std::complex<Real>(src(j, j).real(), Real(0));
    for (Eigen::Index i = 0; i < j; ++i) {
      const std::complex<Real> v = (src(i, j) + std::conj(src(j, i))) / Real(2);
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return HermitianMatrix<Real>(std::move(out));
}

/// Ascending eigenvalues of a Hermitian matrix.
template <typename Real>
RealVector<Real> hermitian_eigenvalues(const HermitianMatrix<Real>& X) {
  if (X.size() == 0) return RealVector<Real>();
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(X.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigenvalues: eigensolver did not converge");
  }
  return es.eigenvalues();
}

template <typename Real>
Real lambda_min(const HermitianMatrix<Real>& X) {
  return hermitian_eigenvalues(X).minCoeff();
}

template <typename Real>
Real lambda_max(const HermitianMatrix<Real>& X) {
  return hermitian_eigenvalues(X).maxCoeff();
}

/// X >= 0 up to the scale-free slack lambda_min(X) >= -tol * max(1, ||X||_F).
template <typename Real>
bool is_psd(const HermitianMatrix<Real>& X, Real tol) {
  if (X.size() == 0) return true;
  const Real slack = tol * std::max(Real(1), X.norm());
  return lambda_min(X) >= -slack;
}

/// X > 0 with the same relative slack, i.e. lambda_min(X) > tol * max(1, ||X||_F).
template <typename Real>
bool is_pd(const HermitianMatrix<Real>& X, Real tol) {
  if (X.size() == 0) return true;
  const Real slack = tol * std::max(Real(1), X.norm());
  return lambda_min(X) > slack;
}

/// Loewner order X >= Y.
template <typename Real>
bool loewner_geq(const HermitianMatrix<Real>& X, const HermitianMatrix<Real>& Y, Real tol) {
  detail::require_same_size(X.size(), Y.size(), "loewner_geq");
  return is_psd(symmetrize(X.matrix() - Y.matrix()), tol);
}

/// Singular values descending.
template <typename Derived>
RealVector<RealOf<Derived>> singular_values(const Eigen::MatrixBase<Derived>& M) {
  using Real = RealOf<Derived>;
  if (M.size() == 0) return RealVector<Real>();
  Eigen::BDCSVD<Matrix<Real>> svd(M.template cast<std::complex<Real>>());
  return svd.singularValues();
}

/// Rank with the singular-value cutoff sigma_max * n * rel_cutoff.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& M, RealOf<Derived> rel_cutoff) {
  using Real = RealOf<Derived>;
  const RealVector<Real> s = singular_values(M);
  if (s.size() == 0 || s(0) == Real(0)) return 0;
  const Real cutoff = s(0) * Real(std::max(M.rows(), M.cols())) * rel_cutoff;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }
  return r;
}

template <typename Derived>
Eigen::Index nullity(const Eigen::MatrixBase<Derived>& M, RealOf<Derived> rel_cutoff) {
  return M.cols() - numerical_rank(M, rel_cutoff);
}

template <typename Real = double>
struct SpectrumSummary {
  std::vector<std::complex<Real>> eigenvalues;
  Real spectral_radius = 0;
  /// Indices i with ||lambda_i| - 1| <= cluster_tol.
  std::vector<std::size_t> unimodular_indices;
  /// Largest Jordan block size over unimodular eigenvalues; 0 if there are none.
  int max_unimodular_index = 0;

  bool operator==(const SpectrumSummary&) const = default;
};

enum class StabilityClass { AsymptoticallyStable, LyapunovStable, Unstable };

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::AsymptoticallyStable:
      return "AsymptoticallyStable";
    case StabilityClass::LyapunovStable:
      return "LyapunovStable";
    case StabilityClass::Unstable:
      return "Unstable";
  }
  return "Unstable";
}

/// Larger is stronger. Used to compare certificates against the spectral classifier.
inline int strength(StabilityClass c) {
  switch (c) {
    case StabilityClass::AsymptoticallyStable:
      return 2;
    case StabilityClass::LyapunovStable:
      return 1;
    case StabilityClass::Unstable:
      return 0;
  }
  return 0;
}

template <typename Derived>
std::vector<std::complex<RealOf<Derived>>> eigenvalues(const Eigen::MatrixBase<Derived>& M) {
  using Real = RealOf<Derived>;
  detail::require_square(M, "eigenvalues");
  if (M.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Matrix<Real>> es(M.template cast<std::complex<Real>>(), false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: complex eigensolver did not converge");
  }
  const auto& ev = es.eigenvalues();
  return std::vector<std::complex<Real>>(ev.data(), ev.data() + ev.size());
}

template <typename Derived>
RealOf<Derived> spectral_radius(const Eigen::MatrixBase<Derived>& M) {
  using Real = RealOf<Derived>;
  Real rho = 0;
  for (const auto& l : eigenvalues(M)) rho = std::max(rho, std::abs(l));
  return rho;
}

namespace detail {

inline constexpr double kJordanRankCutoff = 1e-12;
inline constexpr double kJordanClusterRadius = 1e-4;

/// Jordan index of the eigenvalue `center` with algebraic multiplicity m, from
/// the nullities of successive powers of (M - center I). Returns 0 when the
/// powers never reach nullity m, meaning the cluster is not one eigenvalue.
template <typename Real>
int jordan_index(const Matrix<Real>& M, std::complex<Real> center, Eigen::Index m) {
  const Eigen::Index n = M.rows();
  const Matrix<Real> shifted = M - center * Matrix<Real>::Identity(n, n);
  Matrix<Real> power = shifted;
  for (Eigen::Index p = 1; p <= m; ++p) {
    if (nullity(power, Real(kJordanRankCutoff)) >= m) return static_cast<int>(p);
    power = (power * shifted).eval();
  }
  return 0;
}

}  // namespace detail

/// Eigenvalues, spectral radius and the Jordan structure of unimodular eigenvalues.
template <typename Derived>
SpectrumSummary<RealOf<Derived>> spectrum(const Eigen::MatrixBase<Derived>& M,
                                          RealOf<Derived> cluster_tol = kDefaultClusterTol) {
  using Real = RealOf<Derived>;
  using Complex = std::complex<Real>;
  const Matrix<Real> Mc = M.template cast<Complex>();

  SpectrumSummary<Real> out;
  out.eigenvalues = eigenvalues(Mc);
  for (const auto& l : out.eigenvalues) out.spectral_radius = std::max(out.spectral_radius, std::abs(l));
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    if (std::abs(std::abs(out.eigenvalues[i]) - Real(1)) <= cluster_tol) {
      out.unimodular_indices.push_back(i);
    }
  }
  if (out.unimodular_indices.empty()) return out;

  // Defective eigenvalues split by roughly eps^(1/m) under roundoff, so clusters
  // are grown with a radius wider than cluster_tol.
  const Real radius = std::max(cluster_tol, Real(detail::kJordanClusterRadius) *
                                                std::max(Real(1), out.spectral_radius));
  const std::size_t n = out.eigenvalues.size();
  std::vector<bool> taken(n, false);
  for (std::size_t seed : out.unimodular_indices) {
    if (taken[seed]) continue;
    std::vector<std::size_t> cluster{seed};
    taken[seed] = true;
    for (std::size_t head = 0; head < cluster.size(); ++head) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!taken[j] && std::abs(out.eigenvalues[j] - out.eigenvalues[cluster[head]]) <= radius) {
          taken[j] = true;
          cluster.push_back(j);
        }
      }
    }
    Complex center(0);
    for (std::size_t j : cluster) center += out.eigenvalues[j];
    center /= Real(cluster.size());
    int index = detail::jordan_index(Mc, center, static_cast<Eigen::Index>(cluster.size()));
    if (index == 0) index = 1;  // distinct simple eigenvalues that happened to be close
    out.max_unimodular_index = std::max(out.max_unimodular_index, index);
  }
  return out;
}

template <typename Real>
StabilityClass classify_stability(const SpectrumSummary<Real>& s,
                                  Real cluster_tol = Real(kDefaultClusterTol)) {
  if (s.spectral_radius < Real(1) - cluster_tol) return StabilityClass::AsymptoticallyStable;
  if (s.spectral_radius <= Real(1) + cluster_tol && s.max_unimodular_index <= 1) {
    return StabilityClass::LyapunovStable;
  }
  return StabilityClass::Unstable;
}

/// Strongest discrete-time stability class of M.
template <typename Derived>
StabilityClass classify_stability(const Eigen::MatrixBase<Derived>& M,
                                  RealOf<Derived> cluster_tol = kDefaultClusterTol) {
  return classify_stability(spectrum(M, cluster_tol), cluster_tol);
}

/// Block-diagonal direct sum a (+) b.
template <typename Real>
Matrix<Real> direct_sum(const Matrix<Real>& a, const Matrix<Real>& b) {
  Matrix<Real> out = Matrix<Real>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace dare
