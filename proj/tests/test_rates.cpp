#include "doctest.h"

#include <cmath>
#include <vector>

#include "dare/rates.hpp"

using namespace dare;

namespace {

std::vector<double> geometric(double sigma, int count) {
  std::vector<double> e;
  for (int k = 1; k <= count; ++k) e.push_back(std::pow(sigma, k));
  return e;
}

}  // namespace

TEST_CASE("geometric sequence gives its ratio and no order") {
  const auto e = geometric(0.3, 20);
  const auto r = estimate_rates<double>(e);
  REQUIRE(r.r_linear_rate);
  CHECK(*r.r_linear_rate == doctest::Approx(0.3).epsilon(1e-10));
  CHECK_FALSE(r.r_superlinear_order);
  CHECK(r.points_used == 20);
}

TEST_CASE("quadratic convergence is detected") {
  std::vector<double> e;
  for (int k = 1; k <= 6; ++k) e.push_back(std::pow(0.5, std::pow(2.0, k)));
  const auto r = estimate_rates<double>(e);
  REQUIRE(r.r_superlinear_order);
  CHECK(*r.r_superlinear_order == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("step > 1 measures the rate per plain step") {
  // e_k = sigma^(3^(k-1)), the accelerated view of a plain rate sigma.
  std::vector<double> e;
  for (int k = 1; k <= 5; ++k) e.push_back(std::pow(0.9, std::pow(3.0, k - 1)));
  RateOptions<double> opt;
  opt.step = 3;
  const auto r = estimate_rates<double>(e, std::nullopt, opt);
  REQUIRE(r.r_linear_rate);
  CHECK(*r.r_linear_rate == doctest::Approx(0.9).epsilon(1e-8));
  REQUIRE(r.r_superlinear_order);
  CHECK(*r.r_superlinear_order == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("errors take precedence over residuals") {
  const auto res = geometric(0.8, 10);
  const auto err = geometric(0.2, 10);
  const auto r = estimate_rates<double>(res, std::span<const double>(err));
  CHECK(*r.r_linear_rate == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("entries below the noise floor are dropped") {
  auto e = geometric(0.1, 10);
  e.push_back(0.0);
  e.push_back(1e-300);
  const auto r = estimate_rates<double>(e);
  CHECK(r.points_used == 10);
  CHECK(*r.r_linear_rate == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("too little data") {
  const std::vector<double> e{0.5, 0.25, 0.125};
  CHECK_THROWS_AS(estimate_rates<double>(e), InsufficientDataError);
  const std::vector<double> flat{0, 0, 0, 0};
  const auto r = estimate_rates<double>(flat);
  CHECK_FALSE(r.r_linear_rate);
  CHECK(r.points_used == 0);
}

TEST_CASE("with_bound applies the slack") {
  const auto r = estimate_rates<double>(geometric(0.3, 12));
  CHECK(with_bound(r, 0.26).bound_satisfied);
  CHECK_FALSE(with_bound(r, 0.2).bound_satisfied);
  CHECK(with_bound(r, 0.2, 0.2).bound_satisfied);
  CHECK_FALSE(with_bound(RateReport<double>{}, 1.0).bound_satisfied);
}

TEST_CASE("non-decaying sequence is clamped at rate one") {
  std::vector<double> e(10, 1.0);
  for (int k = 0; k < 10; ++k) e[k] = 1.0 + 0.1 * k;
  const auto r = estimate_rates<double>(e);
  CHECK(*r.r_linear_rate == 1.0);
}
