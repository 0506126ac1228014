#include "doctest.h"

#include "dare/afpi.hpp"
#include "dare/problems.hpp"
#include "oracles.hpp"

using namespace dare;
using Mat = Eigen::MatrixXcd;

TEST_CASE("op_F on scalars by hand") {
  // Y = (2, 1, 0), Z = (2, 1, 0): D = 1, F = (4, 1 + 2*1*2, 0).
  const auto p = scalar_problem(2.0, 1.0, 0.0);
  const auto x1 = seed_triple(p);
  const auto x2 = op_F(x1, x1);
  CHECK(x2.A(0, 0).real() == doctest::Approx(4));
  CHECK(x2.G(0, 0).real() == doctest::Approx(5));
  CHECK(x2.H(0, 0).real() == doctest::Approx(0));
}

TEST_CASE("property: op_F is associative on random PSD triples") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Eigen::Index n = 1 + seed % 6;
    const auto Y = random_psd_triple(n, 3 * seed);
    const auto Z = random_psd_triple(n, 3 * seed + 1);
    const auto W = random_psd_triple(n, 3 * seed + 2);
    CHECK(triple_deviation(op_F(op_F(Y, Z), W), op_F(Y, op_F(Z, W))) <= 1e-10);
  }
}

TEST_CASE("H component of X_k is the k-th plain iterate") {
  const auto p = random_psd_problem(4, 11, 0.95);
  for (int k = 1; k <= 6; ++k) {
    const Mat ref = oracle::fpi_iterate(p.A, p.G.matrix(), p.H.matrix(), k);
    CHECK(oracle::rel(triple_power(p, k).H.matrix(), ref) <= 1e-12);
  }
}

TEST_CASE("discrete flow X_{k+l} = F(X_k, X_l)") {
  const auto p = example1(Example1Params{});
  for (int k = 1; k <= 4; ++k)
    for (int l = 1; l <= 4; ++l) CHECK(discrete_flow_check(p, k, l) <= 1e-10);
  CHECK_THROWS_AS(discrete_flow_check(p, 0, 1), PreconditionError);
}

TEST_CASE("accelerated iterate m equals plain iterate r^m") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_psd_problem(3, seed);
    for (int r = 2; r <= 4; ++r) {
      AcceleratedIteration<double> it(p, r);
      long N = 1;
      while (N * r <= 256) {
        it.step();
        N *= r;
        const Mat ref = oracle::fpi_iterate(p.A, p.G.matrix(), p.H.matrix(), N);
        CHECK(oracle::rel(it.current().H.matrix(), ref) <= 1e-10);
      }
      CHECK(it.f_applications() == long(it.updates()) * (r - 1));
    }
  }
}

TEST_CASE("AcceleratedIteration rejects r < 2") {
  const auto p = scalar_problem(0.5, 1.0, 1.0);
  CHECK_THROWS_AS(AcceleratedIteration<double>(p, 1), PreconditionError);
  CHECK_THROWS_AS(solve_with_order(p, 0, StoppingRule<double>{}), PreconditionError);
}

TEST_CASE("plain iteration on a scalar problem converges to the positive root") {
  const auto p = scalar_problem(0.5, 1.0, 1.0);
  const auto rep = fpi_solve(p);
  CHECK(rep.converged);
  CHECK(rep.termination == Termination::Converged);
  CHECK(rep.monotone_violations == 0);
  CHECK(rep.guarantees_checked);
  const double x = oracle::scalar_roots(0.5, 1.0, 1.0).back();
  CHECK(rep.solution(0, 0).real() == doctest::Approx(x).epsilon(1e-10));
  CHECK(rep.residual_history.size() == std::size_t(rep.iterations));
  CHECK(rep.delta_history.size() == std::size_t(rep.iterations));
  CHECK(rep.delta_history.front() == doctest::Approx(1.0));  // ||X_1 - 0|| = ||H||
  for (double t : rep.elapsed_ms) CHECK(t == 0.0);
  CHECK(rep.riccati_applications == rep.iterations);
  CHECK(rep.f_applications == 0);
}

TEST_CASE("degenerate scalar problem: X = 0 with rho(T) = 1") {
  const auto p = scalar_problem(1.0, 0.0, 0.0);
  const auto rep = fpi_solve(p);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.solution(0, 0) == std::complex<double>(0));
  REQUIRE(rep.closed_loop_spectrum);
  CHECK(rep.closed_loop_spectrum->spectral_radius == doctest::Approx(1));
  CHECK(*rep.stability == StabilityClass::LyapunovStable);
}

TEST_CASE("scalar A = 2, G = 1, H = 0 stops at the minimal solution 0") {
  const auto p = scalar_problem(2.0, 1.0, 0.0);
  for (int r : {1, 2, 3}) {
    const auto rep = solve_with_order(p, r, r == 1 ? StoppingRule<double>::plain() : StoppingRule<double>{});
    CHECK(rep.converged);
    CHECK(rep.solution(0, 0) == std::complex<double>(0));
    CHECK(rep.closed_loop_spectrum->spectral_radius == doctest::Approx(2));
  }
}

TEST_CASE("accelerated solver on Example 1") {
  for (double eps : {0.5, 1.0, 1.5}) {
    Example1Params q;
    q.epsilon = eps;
    const auto p = example1(q);
    for (int r : {2, 3}) {
      const auto rep = afpi_solve(p, r);
      CHECK(rep.converged);
      CHECK(rep.residual_history.back() <= 1e-10);
      CHECK(rep.monotone_violations == 0);
      CHECK(rep.order_used == r);
      CHECK(rep.f_applications == long(rep.iterations - 1) * (r - 1));
    }
  }
}

TEST_CASE("stopping rule validation and max-iteration termination") {
  const auto p = example1(Example1Params{});
  StoppingRule<double> bad;
  bad.tol = 0;
  CHECK_THROWS_AS(fpi_solve(p, bad), PreconditionError);

  StoppingRule<double> tight;
  tight.max_iter = 3;
  const auto rep = fpi_solve(p, tight);
  CHECK_FALSE(rep.converged);
  CHECK(rep.termination == Termination::MaxIterations);
  CHECK(rep.iterations == 3);
}

TEST_CASE("stagnation stops an oscillating iteration") {
  const auto p = example2();
  const auto rep = fpi_solve(p);
  CHECK_FALSE(rep.converged);
  CHECK(rep.termination == Termination::Stagnation);
  CHECK_FALSE(rep.guarantees_checked);
}

TEST_CASE("identical runs give identical reports") {
  const auto p = random_psd_problem(5, 3);
  CHECK(afpi_solve(p, 3) == afpi_solve(p, 3));
  CHECK(fpi_solve(p) == fpi_solve(p));
}

TEST_CASE("divergence is reported for growing iterates") {
  // x -> 1 + 4x with G = 0 grows without bound; the accelerated ladder overflows quickly.
  const auto p = scalar_problem(2.0, 0.0, 1.0);
  StoppingRule<double> s;
  s.stagnation_window = 1000;
  s.max_iter = 1000;
  CHECK_THROWS_AS(afpi_solve(p, 4, s), DivergenceError);
}

TEST_CASE("long double instantiation") {
  using LD = long double;
  const auto p = example1<LD>(Example1Params{});
  StoppingRule<LD> s;
  s.tol = 1e-15L;
  const auto rep = afpi_solve(p, 2, s);
  CHECK(rep.converged);
  CHECK(static_cast<double>(rep.residual_history.back()) <= 1e-15);
}
