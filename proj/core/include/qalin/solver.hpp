#pragma once

// Adaptive refinement for a*x = b: at each step the residual is scaled by a
// power of two into (1/2, 1], the correction law is queried with the
// normalized residual c in [1, 2), and the iterate moves by 2^-l times the
// signed correction.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qalin/sampler.hpp"

namespace qalin {

/// a*x = b rescaled so that 1/2 <= a < 1; original a0 = 2^-shift * a.
struct ProblemInstance {
  double a = 0.5;
  double b = 0.0;
  int shift = 0;

  double solution() const noexcept { return b / a; }
};

/// Flips signs when a0 < 0, then scales both sides by 2^shift. Throws
/// DegenerateProblem when a0 == 0.
ProblemInstance normalize(double a0, double b0);

/// The integer l with 2^l * |res| in (1/2, 1]. Throws std::invalid_argument
/// for zero or non-finite residuals.
int residual_exponent(double res);

struct StepRecord {
  int n = 0;
  double x = 0.0;         // iterate before the step
  double residual = 0.0;  // b - a*x
  int l = 0;
  double c = 0.0;         // 1 / (2^l |residual|)
  double eta = 0.0;
  double delta = 0.0;     // signed scaled correction
  double multiplier = 0.0;  // 1 - a*c*q
};

struct StepResult {
  double x_next = 0.0;
  StepRecord record;
};

/// One refinement step. Returns nullopt when the residual is exactly zero.
/// `exponent_override` replaces the residual exponent (used for the l_0 = 0
/// convention on the first step).
std::optional<StepResult> step(double x, const ProblemInstance& inst,
                               const CorrectionModel& model, double beta, double eta,
                               std::optional<int> exponent_override = std::nullopt);

struct SolveOptions {
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  int max_iter = 50;
  double tol = 0.0;  // stop once |residual| <= tol
  bool zero_initial_exponent = false;  // l_0 = 0 instead of the residual exponent
};

struct IterationTrace {
  std::vector<StepRecord> steps;
  double final_x = 0.0;
  double final_residual = 0.0;
  bool exact = false;      // stopped on an exactly zero residual
  bool converged = false;  // stopped on |residual| <= tol
};

IterationTrace solve(const ProblemInstance& inst, const CorrectionModel& model,
                     const SolveOptions& options);

/// Error path e_n = x_n - b/a driven directly by the multiplier recursion
/// e_{n+1} = e_n * (1 - a c_n q(eta_n, c_n, a, beta)), c_n = 1/(2^{l_n} a|e_n|),
/// starting from e_0 = -b/a. Produces the same iterates as solve() for the
/// same variates, without the cancellation in b - a*x once x is close to b/a.
struct ErrorPath {
  std::vector<double> error;  // error[n] = x_n - b/a, n = 0..steps
  bool exact = false;         // hit an exactly zero error
};

ErrorPath error_recursion(const ProblemInstance& inst, const CorrectionModel& model,
                          double beta, std::span<const double> etas,
                          bool zero_initial_exponent = false);

/// CSV trace: header comment lines, then `n,x,residual,l,c,eta,delta,multiplier`.
/// An exact stop appends a terminal row with empty step fields.
void write_trace_csv(std::ostream& out, const IterationTrace& trace,
                     const std::vector<std::string>& header_lines = {});

}  // namespace qalin
