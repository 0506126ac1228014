#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dare/errors.hpp"

namespace dare {

/// Convergence-rate diagnostics of an error (or residual) sequence.
template <typename Real = double>
struct RateReport {
  /// Estimate of limsup e_k^(1/N_k) per plain fixed-point step, in (0, 1].
  std::optional<Real> r_linear_rate;
  /// Fitted order r of e_k ~ sigma^(r^k) when the decay is super-geometric.
  std::optional<Real> r_superlinear_order;
  /// max{|lambda|^2 : lambda in sigma(T_X*) inside the unit disk}; 0 if not supplied.
  Real predicted_bound = 0;
  bool bound_satisfied = false;
  /// Number of history entries that survived the noise-floor filter.
  std::size_t points_used = 0;
};

template <typename Real = double>
struct RateOptions {
  /// Entries at or below this value are treated as noise and dropped.
  Real noise_floor = Real(1e2) * std::numeric_limits<Real>::epsilon();
  /// Entry k is the plain-iteration index step^(k-1) when step > 1 (accelerated runs).
  int step = 1;
  /// Minimum relative RMS misfit of the log-linear fit that counts as super-geometric.
  Real curvature_threshold = Real(0.02);
};

namespace detail {

template <typename Real>
struct LineFit {
  Real slope = 0;
  Real intercept = 0;
  Real rms = 0;
};

template <typename Real>
LineFit<Real> least_squares(const std::vector<Real>& x, const std::vector<Real>& y) {
  const std::size_t m = x.size();
  Real mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= Real(m);
  my /= Real(m);
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit<Real> f;
  f.slope = sxx > Real(0) ? sxy / sxx : Real(0);
  f.intercept = my - f.slope * mx;
  Real ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Real r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / Real(m));
  return f;
}

}  // namespace detail

/// Fits the R-linear rate sigma (slope of log e_k against the plain-step index over
/// the tail half) and, when the log-linear fit is visibly curved, the R-order r
/// (slope of log(-log e_k) against k). Uses `errors` when given, else `residuals`.
template <typename Real>
RateReport<Real> estimate_rates(std::span<const Real> residuals,
                                std::optional<std::span<const Real>> errors = std::nullopt,
                                const RateOptions<Real>& opt = {}) {
  const std::span<const Real> e = errors ? *errors : residuals;
  if (e.size() < 4) {
    throw InsufficientDataError("estimate_rates: need at least 4 history entries, got " +
                                std::to_string(e.size()));
  }

  std::vector<Real> k_idx, log_e;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (std::isfinite(e[i]) && e[i] > opt.noise_floor) {
      k_idx.push_back(Real(i + 1));
      log_e.push_back(std::log(e[i]));
    }
  }

  RateReport<Real> out;
  out.points_used = k_idx.size();
  if (k_idx.size() < 2) return out;

  // Tail half, but never fewer than three points when available.
  const std::size_t m = k_idx.size();
  const std::size_t keep = std::min(m, std::max<std::size_t>(3, (m + 1) / 2));
  const std::vector<Real> tail_k(k_idx.end() - static_cast<std::ptrdiff_t>(keep), k_idx.end());
  const std::vector<Real> tail_log(log_e.end() - static_cast<std::ptrdiff_t>(keep), log_e.end());

  std::vector<Real> plain_index(tail_k.size());
  for (std::size_t i = 0; i < tail_k.size(); ++i) {
    plain_index[i] = opt.step > 1 ? std::pow(Real(opt.step), tail_k[i] - Real(1)) : tail_k[i];
  }
  const bool indices_finite = std::all_of(plain_index.begin(), plain_index.end(),
                                          [](Real v) { return std::isfinite(v); });
  if (indices_finite) {
    const detail::LineFit<Real> lin = detail::least_squares(plain_index, tail_log);
    out.r_linear_rate = std::clamp(std::exp(lin.slope), std::numeric_limits<Real>::min(), Real(1));
  }

  // Super-geometric decay shows up as curvature of log e_k against k.
  const detail::LineFit<Real> in_k = detail::least_squares(tail_k, tail_log);
  const Real span_log = std::abs(tail_log.front() - tail_log.back());
  const bool curved = span_log > Real(0) && in_k.rms > opt.curvature_threshold * span_log;

  std::vector<Real> sk, loglog;
  for (std::size_t i = 0; i < tail_k.size(); ++i) {
    if (tail_log[i] < Real(0)) {
      sk.push_back(tail_k[i]);
      loglog.push_back(std::log(-tail_log[i]));
    }
  }
  if ((curved || opt.step > 1) && sk.size() >= 2) {
    const detail::LineFit<Real> ll = detail::least_squares(sk, loglog);
    out.r_superlinear_order = std::exp(ll.slope);
  }
  return out;
}

/// Attaches a predicted rate bound and compares the fitted sigma with it.
template <typename Real>
RateReport<Real> with_bound(RateReport<Real> report, Real predicted_bound, Real slack = Real(0.05)) {
  report.predicted_bound = predicted_bound;
  report.bound_satisfied = report.r_linear_rate && *report.r_linear_rate <= predicted_bound + slack;
  return report;
}

}  // namespace dare
