#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qalin/experiments.hpp"
#include "qalin/rate.hpp"

using namespace qalin;

TEST_CASE("mc_convergence: deterministic and thread independent") {
  McOptions opts{.n_traj = 50, .n_iter = 20, .seed = 4};
  const auto s1 = mc_convergence(preset(Algorithm::A3), 0.5, 0.7, 2.0, opts);
  opts.threads = 3;
  const auto s2 = mc_convergence(preset(Algorithm::A3), 0.5, 0.7, 2.0, opts);
  std::ostringstream j1, j2;
  write_mc_json(j1, s1);
  write_mc_json(j2, s2);
  CHECK(j1.str() == j2.str());
  CHECK(s1.median_log_error.size() == 21);
}

TEST_CASE("mc_convergence: contracting model goes to zero") {
  const auto s = mc_convergence(NormalModel{}, 0.5, 0.7, 4.0,
                                {.s = 2.0, .n_traj = 200, .n_iter = 30, .seed = 1});
  CHECK(s.slope < -1.0);
  CHECK(s.diverged_fraction == 0.0);
  CHECK(s.s_scaled_outcome == ScaledOutcome::ToZero);
}

TEST_CASE("mc_convergence: low precision normal model diverges") {
  const auto s = mc_convergence(NormalModel{}, 0.5, 0.7, 0.25, {.n_traj = 100, .n_iter = 200, .seed = 2});
  CHECK(s.diverged_fraction >= 0.9);
  CHECK(s.slope > 0.0);
}

TEST_CASE("mc_convergence: observed slope respects the rate bound") {
  for (const auto& m : std::vector<CorrectionModel>{preset(Algorithm::A2), preset(Algorithm::A4),
                                                     BoltzmannModel(SupportKind::Positive, {-2, 1})}) {
    const double beta = 3.0;
    const double a = 0.5;
    const double e = E_func(m, a, beta).value;
    if (e >= -0.05) continue;
    const auto s = mc_convergence(m, a, 0.7, beta, {.n_traj = 400, .n_iter = 40, .seed = 3});
    CAPTURE(model_id(m));
    CHECK(s.slope <= 0.0);
    CHECK(s.slope <= e + 0.05);
  }
}

TEST_CASE("mc_convergence: input validation") {
  CHECK_THROWS(mc_convergence(NormalModel{}, 0.0, 1.0, 1.0, {}));
  CHECK_THROWS(mc_convergence(NormalModel{}, 1.0, 1.0, 1.0, {.n_traj = 0}));
}

TEST_CASE("write_mc_csv layout") {
  const auto s = mc_convergence(preset(Algorithm::A4), 0.5, 0.7, 2.0, {.n_traj = 10, .n_iter = 3});
  std::ostringstream out;
  write_mc_csv(out, s, {"run"});
  const auto text = out.str();
  CHECK(text.rfind("# run\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') >= 5);
}

TEST_CASE("log_abs_normal_mean_check") {
  const auto c = log_abs_normal_mean_check(200000, 8);
  CHECK(c.closed_form == doctest::Approx(-(kEulerGamma + std::log(2.0)) / 2.0));
  CHECK(std::abs(c.estimate - c.closed_form) <= 4.0 * c.std_error);
  CHECK_THROWS(log_abs_normal_mean_check(1000, 1));
}

TEST_CASE("limit_check: KS shrinks with width") {
  const std::vector<BitRange> full{{-3, 3}, {-5, 5}, {-7, 7}};
  const auto rows = limit_check(1.0, 0.5, 1.0, full, FullLine{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ks > rows[1].ks);
  CHECK(rows[1].ks > rows[2].ks);

  const std::vector<BitRange> interval{{0, 6}, {0, 10}, {0, 14}};
  const auto irows = limit_check(1.0, 0.5, 1.0, interval, Interval{0.0, 2.0});
  CHECK(irows[0].support_size == 64);
  CHECK(irows[0].ks > irows[1].ks);
  CHECK(irows[1].ks > irows[2].ks);
}

TEST_CASE("limit_check: argument errors") {
  CHECK_THROWS(limit_check(1.0, 0.5, 1.0, {{-5, 5}, {-3, 3}}, FullLine{}));
  CHECK_THROWS(limit_check(1.0, 0.5, 1.0, {{-20, 20}}, FullLine{}));
  std::ostringstream out;
  write_limit_csv(out, limit_check(1.0, 0.5, 1.0, {{0, 4}}, Interval{}));
  CHECK(out.str().find("0,4,4,16,") != std::string::npos);
}
