#include "doctest.h"

#include "dare/analysis.hpp"
#include "dare/problems.hpp"

using namespace dare;
using Mat = Eigen::MatrixXcd;

namespace {

HermitianMatrixd scalar(double x) {
  Mat m(1, 1);
  m(0, 0) = x;
  return symmetrize(m);
}

}  // namespace

TEST_CASE("classification of the two scalar solutions") {
  const auto p = scalar_problem(2.0, 1.0, 0.0);

  const auto zero = classify_solution(p, scalar(0), true);
  CHECK(zero.is_solution);
  CHECK(zero.minimality_evidence == MinimalityEvidence::FromMonotoneFPI);
  CHECK(zero.stabilizing == Stabilizing::NotStabilizing);
  CHECK(*zero.closed_loop_radius == doctest::Approx(2));

  const auto three = classify_solution(p, scalar(3), false);
  CHECK(three.is_solution);
  CHECK(three.minimality_evidence == MinimalityEvidence::Unknown);
  CHECK(three.stabilizing == Stabilizing::Stabilizing);
  CHECK(*three.closed_loop_radius == doctest::Approx(0.5));

  const auto one = classify_solution(p, scalar(1), true);
  CHECK_FALSE(one.is_solution);
  CHECK(one.minimality_evidence == MinimalityEvidence::Unknown);
}

TEST_CASE("almost stabilizing and singular cases") {
  const auto p = scalar_problem(1.0, 0.0, 0.0);
  CHECK(classify_solution(p, scalar(0), true).stabilizing == Stabilizing::AlmostStabilizing);

  const auto q = scalar_problem(1.0, 1.0, 0.0);
  const auto c = classify_solution(q, scalar(-1), false);
  CHECK_FALSE(c.is_solution);
  CHECK_FALSE(c.closed_loop_radius);
}

TEST_CASE("provenance from a report") {
  const auto p = example1(Example1Params{});
  const auto rep = afpi_solve(p, 2);
  CHECK(monotone_provenance(rep));
  const auto c = classify_solution(p, rep);
  CHECK(c.is_solution);
  CHECK(c.minimality_evidence == MinimalityEvidence::FromMonotoneFPI);

  const auto bad = fpi_solve(example2());
  CHECK_FALSE(monotone_provenance(bad));
}

TEST_CASE("rate bound from the closed-loop spectrum") {
  // Solution 3 of the scalar problem has T = 0.5, so the bound is 0.25.
  const auto p = scalar_problem(2.0, 1.0, 0.0);
  CHECK(rate_bound_from_solution(p, scalar(3)) == doctest::Approx(0.25));
  // T = 2 lies outside the disk and contributes nothing.
  CHECK(rate_bound_from_solution(p, scalar(0)) == 0);
  CHECK_THROWS_AS(rate_bound_from_solution(p, scalar(1)), PreconditionError);
}

TEST_CASE("plain iteration rate on Example 1 respects the bound") {
  const auto p = example1(Example1Params{});
  const auto rep = fpi_solve(p);
  REQUIRE(rep.converged);
  const double bound = rate_bound_from_solution(p, rep.solution);
  RateOptions<double> opt;
  const auto rates = with_bound(estimate_rates<double>(rep.residual_history, std::nullopt, opt), bound);
  CHECK(rates.bound_satisfied);
}
