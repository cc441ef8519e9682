#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qalin/dist.hpp"

using namespace qalin;

TEST_CASE("boltzmann_dist: two-point law") {
  const std::vector<double> support{0.0, 1.0};
  const auto d = boltzmann_dist(1.0, support, 1.0, 1.0);
  const double z = 1.0 + std::exp(-1.0);
  CHECK(d.pmf[1] == doctest::Approx(1.0 / z).epsilon(1e-15));
  CHECK(d.pmf[0] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-15));
  CHECK(d.pmf[1] == doctest::Approx(0.731059).epsilon(1e-6));
  CHECK(d.cdf.back() == 1.0);
}

TEST_CASE("boltzmann_dist: symmetric energies give a symmetric law") {
  const std::vector<double> support{-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto d = boltzmann_dist(1.7, support, 0.0, 0.8);
  for (std::size_t k = 0; k < support.size(); ++k) {
    CHECK(d.pmf[k] == doctest::Approx(d.pmf[support.size() - 1 - k]).epsilon(1e-15));
  }
}

TEST_CASE("boltzmann_dist: large beta concentrates on the argmin") {
  const std::vector<double> support{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto d = boltzmann_dist(1e3, support, 0.6, 1.0);
  CHECK(d.pmf[2] >= 1.0 - 1e-9);
}

TEST_CASE("boltzmann_dist: invariant under adding a constant to H") {
  // Shifting the target by a multiple of a along with the support adds no
  // energy; compare the weights computed explicitly with and without a shift.
  const std::vector<double> support{-0.75, -0.25, 0.5, 1.25, 2.0};
  const double beta = 1.3, a = 0.7, target = 0.4;
  const auto d = boltzmann_dist(beta, support, target, a);
  std::vector<double> w;
  for (double v : support) {
    const double h = (a * v - target) * (a * v - target) + 123.0;
    w.push_back(std::exp(-beta * beta * (h - 123.0)));
  }
  const auto ref = make_discrete(support, w);
  for (std::size_t k = 0; k < support.size(); ++k) {
    CHECK(std::abs(d.pmf[k] - ref.pmf[k]) <= 1e-14);
  }
  double sum = 0;
  for (double m : d.pmf) sum += m;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("boltzmann_dist: extreme energies underflow without overflow") {
  const std::vector<double> support{-100.0, 0.0, 100.0};
  const auto d = boltzmann_dist(50.0, support, 0.0, 1.0);
  CHECK(d.pmf[1] == 1.0);
  CHECK(d.pmf[0] == 0.0);
  CHECK(quantile(d, 0.0) == 0.0);
  CHECK(quantile(d, 1.0) == 0.0);
}

TEST_CASE("quantile: examples") {
  const std::vector<double> support{0.0, 1.0};
  const auto d = boltzmann_dist(1.0, support, 1.0, 1.0);
  CHECK(quantile(d, 0.2) == 0.0);
  CHECK(quantile(d, 0.5) == 1.0);
  CHECK(quantile(d, 1.0) == 1.0);
  CHECK(quantile(d, 0.0) == 0.0);
  CHECK_THROWS_AS(quantile(d, 1.5), std::invalid_argument);
}

TEST_CASE("quantile: step function hitting support values at cdf levels") {
  const std::vector<double> support{-1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  const auto d = boltzmann_dist(0.9, support, 0.3, 0.6);
  for (std::size_t k = 0; k < d.size(); ++k) CHECK(quantile(d, d.cdf[k]) == d.support[k]);
  double prev = quantile(d, 0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double q = quantile(d, i / 1000.0);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("erf and erfinv") {
  CHECK(qalin::erf(0.0) == 0.0);
  CHECK(erfinv(0.0) == 0.0);
  CHECK(qalin::erf(1.0) == doctest::Approx(oracle::erf_by_quadrature(1.0)).epsilon(1e-12));
  CHECK(qalin::erf(1.0) == doctest::Approx(0.8427008).epsilon(1e-7));
  for (double x : {-2.5, -0.3, 0.7, 1.9}) {
    CHECK(std::abs(qalin::erf(x) - oracle::erf_by_quadrature(x)) <= 1e-12);
  }
  for (double x = -5.0; x <= 5.0; x += 0.125) {
    CAPTURE(x);
    const double y = qalin::erf(x);
    // erf(x) itself is rounded to half an ulp; beyond |x| ~ 4 that rounding,
    // divided by erf'(x), exceeds 1e-8 and bounds any inverse.
    const double slope = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
    const double conditioning = std::nextafter(std::abs(y), 2.0) - std::abs(y);
    CHECK(std::abs(erfinv(y) - x) <= std::max(1e-8, 2.0 * conditioning / slope));
    if (std::abs(x) <= 4.0) CHECK(std::abs(erfinv(y) - x) <= 1e-8);
  }
  CHECK_THROWS_AS(erfinv(1.0), std::invalid_argument);
  CHECK_THROWS_AS(erfinv(-1.5), std::invalid_argument);
}

TEST_CASE("std_normal_quantile") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  const double ref = oracle::bisect(cdf, 0.975, -10.0, 10.0);
  CHECK(std::abs(std_normal_quantile(0.975) - ref) <= 1e-9);
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  // Dyadic levels so that 1 - u is exact.
  for (double u : {0x1.0p-40, 0x1.0p-24, 0.0078125, 0.203125, 0.4921875}) {
    CHECK(std::abs(std_normal_quantile(u) + std_normal_quantile(1.0 - u)) <= 1e-9);
  }
  for (double u : {1e-12, 1e-7, 0.01, 0.2, 0.49, 0.8, 0.999}) {
    CHECK(std::abs(std_normal_quantile(u) - oracle::bisect(cdf, u, -10.0, 10.0)) <= 1e-9);
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("trunc_normal_quantile: endpoints, median and bisection oracle") {
  const TruncNormalParams sym{0.3, 0.8, -0.7, 1.3};
  CHECK(trunc_normal_quantile(sym, 0.5) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(trunc_normal_quantile(sym, 0.0) == -0.7);
  CHECK(trunc_normal_quantile(sym, 1.0) == 1.3);
  CHECK(std::abs(trunc_normal_quantile(sym, 1e-13) + 0.7) <= 1e-9);
  CHECK(std::abs(trunc_normal_quantile(sym, 1.0 - 1e-13) - 1.3) <= 1e-9);

  const TruncNormalParams p{1.0, 0.5, 0.0, 2.0};
  const auto cdf = [](double x) { return oracle::trunc_normal_cdf(1.0, 0.5, 0.0, 2.0, x); };
  CHECK(std::abs(trunc_normal_quantile(p, 0.25) - oracle::bisect(cdf, 0.25, 0.0, 2.0, 80)) <=
        1e-8);

  // Far-tail truncation (both bounds on one side of the mean).
  for (const auto& t : {TruncNormalParams{2.0, 0.1, 0.5, 1.0}, TruncNormalParams{-1.0, 0.2, 0.0, 2.0},
                        TruncNormalParams{0.25, 0.35, 0.5, 2.0}}) {
    for (double u : {0.1, 0.5, 0.9}) {
      const auto f = [&](double x) { return oracle::trunc_normal_cdf(t.mu, t.sigma, t.d1, t.d2, x); };
      CHECK(std::abs(trunc_normal_quantile(t, u) - oracle::bisect(f, u, t.d1, t.d2, 80)) <= 1e-8);
    }
  }
}

TEST_CASE("trunc_normal_quantile: swapped bounds and bad parameters") {
  const TruncNormalParams swapped{0.0, 1.0, 1.0, -1.0};
  CHECK(trunc_normal_quantile(swapped, 0.0) == -1.0);
  CHECK(trunc_normal_quantile(swapped, 1.0) == 1.0);
  CHECK_THROWS_AS(trunc_normal_quantile({0.0, 0.0, 0.0, 1.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(trunc_normal_quantile({0.0, 1.0, 1.0, 1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("trunc_normal_quantile: strictly increasing onto [d1, d2]") {
  for (const auto& t : {TruncNormalParams{1.0, 0.354, 0.0, 2.0}, TruncNormalParams{2.0, 0.177, 0.5, 1.0},
                        TruncNormalParams{0.5, 1.4, -2.0, 2.0}}) {
    double prev = trunc_normal_quantile(t, 0.0);
    CHECK(prev == t.d1);
    for (int i = 1; i <= 2000; ++i) {
      const double q = trunc_normal_quantile(t, i / 2000.0);
      CHECK(q > prev);
      CHECK(q <= t.d2);
      prev = q;
    }
  }
}

TEST_CASE("trunc_normal_quantile reproduces the closed form in (u, c, a, beta)") {
  // q(u,c,a,beta) = 1/(ac) + erfinv((1-u) erf(d1 a beta - beta/c) + u erf(d2 a beta - beta/c)) / (a beta)
  for (double a : {0.5, 0.8}) {
    for (double c : {1.0, 1.6}) {
      for (double beta : {0.7, 2.0}) {
        for (double u : {0.05, 0.5, 0.93}) {
          const double d1 = 0.0, d2 = 2.0;
          const double literal =
              1.0 / (a * c) +
              erfinv((1 - u) * std::erf(d1 * a * beta - beta / c) +
                     u * std::erf(d2 * a * beta - beta / c)) /
                  (a * beta);
          const TruncNormalParams t{1.0 / (a * c), 1.0 / (std::numbers::sqrt2 * a * beta), d1, d2};
          CHECK(trunc_normal_quantile(t, u) == doctest::Approx(literal).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("trunc_normal_cdf inverts the quantile") {
  const TruncNormalParams t{0.8, 0.3, 0.5, 2.0};
  for (double u = 0.05; u < 1.0; u += 0.1) {
    CHECK(trunc_normal_cdf(t, trunc_normal_quantile(t, u)) == doctest::Approx(u).epsilon(1e-10));
  }
  CHECK(trunc_normal_cdf(t, 0.0) == 0.0);
  CHECK(trunc_normal_cdf(t, 3.0) == 1.0);
}
