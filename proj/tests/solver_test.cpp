#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "qalin/errors.hpp"
#include "qalin/solver.hpp"
#include "qalin/uniform_stream.hpp"

using namespace qalin;

namespace {

// Checks every per-step identity of a trace.
void check_trace_invariants(const ProblemInstance& inst, const IterationTrace& trace) {
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const auto& s = trace.steps[n];
    CAPTURE(n);
    const double mag = std::abs(s.residual);
    CHECK(std::ldexp(mag, s.l) > 0.5);
    CHECK(std::ldexp(mag, s.l) <= 1.0);
    CHECK(s.c >= 1.0);
    CHECK(s.c < 2.0);
    CHECK(s.c == 1.0 / std::ldexp(mag, s.l));
    const double next_x = n + 1 < trace.steps.size() ? trace.steps[n + 1].x : trace.final_x;
    CHECK(next_x == s.x + std::ldexp(s.delta, -s.l));
    const double next_res = inst.b - inst.a * next_x;
    const double scale = std::abs(inst.b) + std::abs(inst.a * next_x) + std::abs(inst.a * s.x);
    CHECK(std::abs(next_res - s.residual * s.multiplier) <= 4e-16 * scale);
  }
}

}  // namespace

TEST_CASE("normalize examples") {
  const auto p = normalize(3.0, 5.0);
  CHECK(p.a == 0.75);
  CHECK(p.b == 1.25);
  CHECK(p.shift == -2);
  const auto q = normalize(0.5, 1.0);
  CHECK(q.a == 0.5);
  CHECK(q.b == 1.0);
  CHECK(q.shift == 0);
  const auto r = normalize(-1.0, 2.0);
  CHECK(r.a == 0.5);
  CHECK(r.b == -1.0);
  CHECK(r.shift == -1);
  CHECK(r.solution() == -2.0);
  CHECK_THROWS_AS(normalize(0.0, 1.0), DegenerateProblem);
}

TEST_CASE("normalize preserves the solution exactly") {
  for (double a0 : {1e-7, 0.3, 1.0, 7.5, -3e5}) {
    for (double b0 : {-2.0, 0.1, 1e4}) {
      const auto inst = normalize(a0, b0);
      CHECK(inst.a >= 0.5);
      CHECK(inst.a < 1.0);
      CHECK(inst.b / inst.a == b0 / a0);
      CHECK(std::ldexp(std::abs(a0), inst.shift) == inst.a);
    }
  }
}

TEST_CASE("residual_exponent examples and boundaries") {
  CHECK(residual_exponent(1.0) == 0);
  CHECK(residual_exponent(0.3) == 1);
  CHECK(residual_exponent(5.0) == -3);
  CHECK(residual_exponent(-0.5) == 1);
  CHECK(residual_exponent(0.25) == 2);
  CHECK(residual_exponent(std::nextafter(0.5, 1.0)) == 0);
  CHECK_THROWS_AS(residual_exponent(0.0), std::invalid_argument);
  for (double res : {1e-300, 3e-17, 0.7, 123.0, 1e200}) {
    const int l = residual_exponent(res);
    CHECK(std::ldexp(res, l) > 0.5);
    CHECK(std::ldexp(res, l) <= 1.0);
  }
}

TEST_CASE("step: normal median lands on the solution") {
  const auto inst = normalize(0.5, 0.7);
  const auto res = step(0.0, inst, NormalModel{}, 2.0, 0.5);
  REQUIRE(res);
  CHECK(res->x_next == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(std::abs(res->record.multiplier) <= 1e-15);
}

TEST_CASE("step: sign factor for a negative residual") {
  const auto inst = normalize(0.5, 0.25);
  const CorrectionModel m = BoltzmannModel(SupportKind::Positive, {-2, 1});
  for (double eta : {0.01, 0.3, 0.7, 0.99}) {
    const auto res = step(1.0, inst, m, 1.5, eta);  // residual = 0.25 - 0.5 < 0
    REQUIRE(res);
    CHECK(res->record.residual < 0.0);
    CHECK(res->record.delta <= 0.0);
  }
}

TEST_CASE("step: A4 from x = 0 for a = b = 1/2") {
  const ProblemInstance inst{0.5, 0.5, 0};
  const auto res = step(0.0, inst, preset(Algorithm::A4), 2.0, 0.5);
  REQUIRE(res);
  const auto& s = res->record;
  CHECK(s.l == 1);  // 2^1 * 0.5 = 1 closes the interval (1/2, 1]
  CHECK(s.c == 1.0);
  const double q = q_value(preset(Algorithm::A4), 0.5, 1.0, 0.5, 2.0);
  CHECK(s.delta == q);
  CHECK(s.multiplier == 1.0 - 0.5 * q);
  const double err_before = inst.solution() - 0.0;
  const double err_after = inst.solution() - res->x_next;
  CHECK(std::abs(err_after - err_before * s.multiplier) <= 1e-14);
}

TEST_CASE("step: zero residual signals an exact solution") {
  const ProblemInstance inst{0.5, 0.25, 0};
  CHECK_FALSE(step(0.5, inst, NormalModel{}, 1.0, 0.3));
}

TEST_CASE("solve: b = 0 returns immediately") {
  const auto trace = solve(normalize(0.5, 0.0), NormalModel{}, {.beta = 1.0, .seed = 3});
  CHECK(trace.steps.empty());
  CHECK(trace.exact);
  CHECK(trace.final_x == 0.0);
}

TEST_CASE("solve: deterministic and invariant-preserving") {
  const auto inst = normalize(0.5, 0.7);
  const std::vector<CorrectionModel> models{
      NormalModel{}, preset(Algorithm::A2), preset(Algorithm::A4),
      BoltzmannModel(SupportKind::SignedSymmetric, {-3, 1})};
  for (const auto& m : models) {
    const SolveOptions opts{.beta = 2.0, .seed = 11, .max_iter = 40};
    const auto t1 = solve(inst, m, opts);
    const auto t2 = solve(inst, m, opts);
    std::ostringstream s1, s2;
    write_trace_csv(s1, t1);
    write_trace_csv(s2, t2);
    CHECK(s1.str() == s2.str());
    check_trace_invariants(inst, t1);
  }
}

TEST_CASE("solve: scale invariance") {
  const SolveOptions opts{.beta = 1.5, .seed = 5, .max_iter = 30};
  const auto t1 = solve(normalize(0.3, 0.9), preset(Algorithm::A2), opts);
  const auto t2 = solve(normalize(0.6, 1.8), preset(Algorithm::A2), opts);
  REQUIRE(t1.steps.size() == t2.steps.size());
  for (std::size_t n = 0; n < t1.steps.size(); ++n) CHECK(t1.steps[n].x == t2.steps[n].x);
}

TEST_CASE("solve: tolerance and zero initial exponent") {
  const auto inst = normalize(0.5, 0.7);
  const auto trace = solve(inst, NormalModel{}, {.beta = 50.0, .seed = 1, .max_iter = 100, .tol = 1e-8});
  CHECK(trace.converged);
  CHECK(std::abs(trace.final_residual) <= 1e-8);
  CHECK(trace.steps.size() < 100);

  const auto zero_l = solve(normalize(0.5, 3.0), NormalModel{},
                           {.beta = 2.0, .seed = 1, .max_iter = 5, .zero_initial_exponent = true});
  CHECK(zero_l.steps.front().l == 0);
  CHECK(zero_l.steps.front().c == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(solve(inst, NormalModel{}, {.max_iter = 0}), std::invalid_argument);
}

TEST_CASE("solve: high precision normal model contracts by 10x per step") {
  const auto inst = normalize(0.5, 0.7);
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto trace = solve(inst, NormalModel{}, {.beta = 1e3, .seed = seed, .max_iter = 5});
    bool ok = trace.steps.size() == 5 || trace.exact;
    double prev = std::abs(inst.solution());
    for (std::size_t n = 1; n < trace.steps.size(); ++n) {
      const double err = std::abs(trace.steps[n].x - inst.solution());
      ok = ok && err <= prev / 10.0;
      prev = err;
    }
    if (!ok) ++failures;
  }
  CHECK(failures <= 1);
}

TEST_CASE("error_recursion replays solve") {
  const auto inst = normalize(0.5, 0.7);
  for (const auto& m : std::vector<CorrectionModel>{NormalModel{}, preset(Algorithm::A3),
                                                     BoltzmannModel(SupportKind::Positive, {-3, 1})}) {
    for (bool zero_l : {false, true}) {
      const SolveOptions opts{.beta = 3.0, .seed = 9, .max_iter = 30, .zero_initial_exponent = zero_l};
      const auto trace = solve(inst, m, opts);
      std::vector<double> etas;
      for (const auto& s : trace.steps) etas.push_back(s.eta);
      const auto path = error_recursion(inst, m, 3.0, etas, zero_l);
      for (std::size_t n = 0; n < trace.steps.size() && n < path.error.size(); ++n) {
        CHECK(std::abs(trace.steps[n].x - (inst.solution() + path.error[n])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("uniform stream: open interval and reproducible") {
  const UniformStream s(42, 3);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double u = s(k);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == UniformStream(42, 3)(k));
  }
  CHECK(UniformStream(42, 3)(0) != UniformStream(42, 4)(0));
}

TEST_CASE("write_trace_csv: exact stop row") {
  const auto trace = solve(normalize(0.5, 0.0), NormalModel{}, {.beta = 1.0});
  std::ostringstream out;
  write_trace_csv(out, trace, {"config"});
  CHECK(out.str() == "# config\n# exact=1 steps=0\nn,x,residual,l,c,eta,delta,multiplier\n0,0,0,,,,,\n");
}
