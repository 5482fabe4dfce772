#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cpmmh/diagnostics.hpp"
#include "cpmmh/estimators.hpp"
#include "cpmmh/models.hpp"
#include "cpmmh/random.hpp"

using namespace cpmmh;

TEST_CASE("iact of white noise is close to one") {
  RandomStream rng(1);
  std::vector<double> s(100000);
  for (double& v : s) v = rng.normal();
  CHECK_THAT(iact(s), Catch::Matchers::WithinAbs(1.0, 0.1));
}

TEST_CASE("iact of an AR(1) series matches the truncated geometric sum") {
  RandomStream rng(2);
  const double a = 0.9;
  std::vector<double> s(1000000);
  double x = 0.0;
  for (double& v : s) {
    x = a * x + std::sqrt(1.0 - a * a) * rng.normal();
    v = x;
  }
  // 1 + 2 sum_{tau=1}^{100} 0.9^tau
  const double expected = 1.0 + 2.0 * a * (1.0 - std::pow(a, 100.0)) / (1.0 - a);
  CHECK(iact(s) == Catch::Approx(expected).epsilon(0.05));
}

TEST_CASE("iact of an alternating series cancels pairwise") {
  const std::size_t n = 10000;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i % 2 == 0 ? 1.0 : -1.0;
  // with the fixed denominator-n normalisation, rho_tau = (1 - tau/n)(-1)^tau,
  // so the truncated sum leaves -100/n instead of exactly 0
  double expected = 1.0;
  for (std::size_t tau = 1; tau <= 100; ++tau) {
    const double rho =
        (1.0 - static_cast<double>(tau) / static_cast<double>(n)) * (tau % 2 == 0 ? 1.0 : -1.0);
    expected += 2.0 * rho;
  }
  CHECK(iact(s) == Catch::Approx(expected).margin(1e-10));
  CHECK_THAT(iact(s), Catch::Matchers::WithinAbs(1.0, 0.05));
}

TEST_CASE("iact rejects short and constant series") {
  std::vector<double> small(50, 1.0);
  CHECK_THROWS(iact(small));
  std::vector<double> constant(1000, 2.5);
  CHECK_THROWS(iact(constant));
}

TEST_CASE("iact is invariant to translation and positive scaling") {
  RandomStream rng(3);
  std::vector<double> s(20000);
  double x = 0.0;
  for (double& v : s) {
    x = 0.7 * x + rng.normal();
    v = x;
  }
  const double base = iact(s);
  std::vector<double> t(s);
  for (double& v : t) v = 3.5 * v - 11.0;
  CHECK(iact(t) == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("correlation scan: independent redraw at sigma_u = 1, saturation at 0") {
  const GaussianIIDModel m{0.5, 0.3, 0.1};
  RandomStream data_rng(4);
  const auto y = simulate_iid(m, 10, data_rng);
  auto loglik = [&](const AuxBlock& u) {
    return importance_sampling_loglik(m, y, u, ISScale::stddev).log_likelihood;
  };
  RandomStream rng(5);
  const std::vector<double> grid{0.0, 0.05, 0.5, 1.0};
  const auto rows = loglik_correlation_scan(loglik, 10, 10, grid, 4000, rng);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].correlation == 1.0);
  CHECK(rows[1].correlation > 0.9);  // near-identity proposal
  CHECK(std::fabs(rows[3].correlation) < 2.0 / std::sqrt(4000.0));
  // monotone decrease along the grid up to Monte Carlo noise
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].correlation < rows[i - 1].correlation + 0.05);
  }
}

TEST_CASE("loglik_stddev: an estimator ignoring u has zero spread") {
  auto constant = [](const AuxBlock&) { return -3.7; };
  RandomStream rng(6);
  CHECK_THAT(loglik_stddev(constant, 2, 2, 500, rng),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("loglik_stddev shrinks when the sample count doubles") {
  const GaussianIIDModel m{0.5, 0.3, 0.1};
  RandomStream data_rng(7);
  const auto y = simulate_iid(m, 10, data_rng);
  RandomStream rng(8);
  auto at = [&](std::size_t n_samples) {
    auto loglik = [&](const AuxBlock& u) {
      return importance_sampling_loglik(m, y, u, ISScale::stddev).log_likelihood;
    };
    return loglik_stddev(loglik, 10, n_samples, 4000, rng);
  };
  const double s10 = at(10);
  const double s20 = at(20);
  // strict decrease well beyond two standard errors of the spread estimate
  CHECK(s20 < s10 * 0.92);
}

TEST_CASE("posterior_summary on a constant trace") {
  ChainTrace trace(1, 200);
  const std::vector<double> theta{1.25};
  for (std::size_t k = 0; k < 200; ++k) {
    trace.record(k, theta, -1.0, false, MoveKind::local, 0.0);
  }
  const auto s = posterior_summary(trace, 50);
  CHECK(s.mean[0] == 1.25);
  CHECK(s.stddev[0] == 0.0);
  CHECK(s.acceptance_rate == 0.0);
  CHECK(std::isnan(s.iact_per_parameter[0]));
}

TEST_CASE("posterior_summary recovers the moments of an IID trace") {
  RandomStream rng(9);
  const std::size_t n = 150000;
  ChainTrace trace(1, n);
  std::size_t accepted = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double> theta{2.0 + 0.5 * rng.normal()};
    const bool acc = k % 4 != 0;  // exact acceptance pattern: 3/4
    accepted += acc ? 1 : 0;
    trace.record(k, theta, 0.0, acc, MoveKind::local, 0.5);
  }
  const auto s = posterior_summary(trace, 0);
  CHECK_THAT(s.mean[0], Catch::Matchers::WithinAbs(2.0, 0.01));
  CHECK_THAT(s.stddev[0], Catch::Matchers::WithinAbs(0.5, 0.01));
  CHECK(s.acceptance_rate == static_cast<double>(accepted) / n);
  CHECK_THAT(s.q50[0], Catch::Matchers::WithinAbs(2.0, 0.01));
  CHECK_THAT(s.q05[0], Catch::Matchers::WithinAbs(2.0 - 1.6449 * 0.5, 0.02));
  CHECK_THAT(s.q95[0], Catch::Matchers::WithinAbs(2.0 + 1.6449 * 0.5, 0.02));
  CHECK_THAT(s.iact_per_parameter[0], Catch::Matchers::WithinAbs(1.0, 0.1));
}

TEST_CASE("linear_fit recovers a known line") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 0.5, 0.0, -0.5};
  const auto [slope, intercept] = linear_fit(x, y);
  CHECK(slope == Catch::Approx(-0.5).epsilon(1e-12));
  CHECK(intercept == Catch::Approx(1.0).epsilon(1e-12));
}
