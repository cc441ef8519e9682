#include "qalin/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "qalin/errors.hpp"
#include "qalin/uniform_stream.hpp"

namespace qalin {

ProblemInstance normalize(double a0, double b0) {
  if (a0 == 0.0) throw DegenerateProblem("equation a*x = b requires a != 0");
  if (!std::isfinite(a0) || !std::isfinite(b0)) {
    throw std::invalid_argument("equation coefficients must be finite");
  }
  if (a0 < 0.0) {
    a0 = -a0;
    b0 = -b0;
  }
  int e = 0;
  const double m = std::frexp(a0, &e);  // a0 = m * 2^e, m in [1/2, 1)
  return {m, std::ldexp(b0, -e), -e};
}

int residual_exponent(double res) {
  if (res == 0.0 || !std::isfinite(res)) {
    throw std::invalid_argument("residual exponent requires a nonzero finite residual");
  }
  int e = 0;
  const double m = std::frexp(std::abs(res), &e);  // |res| = m * 2^e, m in [1/2, 1)
  // The closed end belongs to the smaller shift: 2^l |res| = 1, not 1/2.
  return m == 0.5 ? 1 - e : -e;
}

std::optional<StepResult> step(double x, const ProblemInstance& inst,
                               const CorrectionModel& model, double beta, double eta,
                               std::optional<int> exponent_override) {
  const double residual = inst.b - inst.a * x;
  if (residual == 0.0) return std::nullopt;

  StepRecord rec;
  rec.x = x;
  rec.residual = residual;
  rec.l = exponent_override ? *exponent_override : residual_exponent(residual);
  rec.c = 1.0 / std::ldexp(std::abs(residual), rec.l);
  rec.eta = eta;
  const double q = q_value(model, eta, rec.c, inst.a, beta);
  rec.delta = residual > 0.0 ? q : -q;
  rec.multiplier = 1.0 - inst.a * rec.c * q;
  return StepResult{x + std::ldexp(rec.delta, -rec.l), rec};
}

IterationTrace solve(const ProblemInstance& inst, const CorrectionModel& model,
                     const SolveOptions& options) {
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(options.tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
  validate(model);

  const UniformStream stream(options.seed, options.trajectory);
  IterationTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(options.max_iter));
  double x = 0.0;
  for (int n = 0; n < options.max_iter; ++n) {
    const double residual = inst.b - inst.a * x;
    if (residual == 0.0) {
      trace.exact = true;
      break;
    }
    if (std::abs(residual) <= options.tol) {
      trace.converged = true;
      break;
    }
    std::optional<int> override;
    if (n == 0 && options.zero_initial_exponent) override = 0;
    auto result = step(x, inst, model, options.beta, stream(static_cast<std::uint64_t>(n)),
                       override);
    result->record.n = n;
    trace.steps.push_back(result->record);
    x = result->x_next;
  }
  trace.final_x = x;
  trace.final_residual = inst.b - inst.a * x;
  if (!trace.exact && !trace.converged) {
    trace.exact = trace.final_residual == 0.0;
    trace.converged = std::abs(trace.final_residual) <= options.tol;
  }
  return trace;
}

ErrorPath error_recursion(const ProblemInstance& inst, const CorrectionModel& model,
                          double beta, std::span<const double> etas, bool zero_initial_exponent) {
  validate(model);
  ErrorPath path;
  path.error.reserve(etas.size() + 1);
  double e = -inst.solution();
  path.error.push_back(e);
  for (std::size_t n = 0; n < etas.size(); ++n) {
    if (e == 0.0) {
      path.exact = true;
      break;
    }
    if (!std::isfinite(e)) break;
    const double scaled = inst.a * std::abs(e);  // |residual|
    const int l = (n == 0 && zero_initial_exponent) ? 0 : residual_exponent(scaled);
    const double c = 1.0 / std::ldexp(scaled, l);
    const double q = q_value(model, etas[n], c, inst.a, beta);
    e *= 1.0 - inst.a * c * q;
    path.error.push_back(e);
  }
  if (!path.error.empty() && path.error.back() == 0.0) path.exact = true;
  return path;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const IterationTrace& trace,
                     const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# exact=" << (trace.exact ? 1 : 0) << " steps=" << trace.steps.size() << '\n';
  out << "n,x,residual,l,c,eta,delta,multiplier\n";
  for (const auto& s : trace.steps) {
    out << s.n << ',' << fmt(s.x) << ',' << fmt(s.residual) << ',' << s.l << ',' << fmt(s.c)
        << ',' << fmt(s.eta) << ',' << fmt(s.delta) << ',' << fmt(s.multiplier) << '\n';
  }
  if (trace.exact) {
    out << trace.steps.size() << ',' << fmt(trace.final_x) << ',' << fmt(trace.final_residual)
        << ",,,,,\n";
  }
}

}  // namespace qalin
