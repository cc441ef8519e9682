#pragma once

// Desk-scale studies of the refinement schemes: Monte Carlo convergence of
// the error path, the E ln|xi| constant behind the normal-model thresholds,
// and exact distances between finite Boltzmann laws and their normal limits.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qalin/encoding.hpp"
#include "qalin/sampler.hpp"

namespace qalin {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

enum class ScaledOutcome { ToZero, ToInfinity, Inconclusive };
std::string to_string(ScaledOutcome outcome);

struct McOptions {
  double s = 1.0;
  int n_traj = 1000;
  int n_iter = 40;
  std::uint64_t seed = 0;
  /// l_0 = 0 on the first step; defaults to true for the normal model only.
  std::optional<bool> zero_initial_exponent;
  double divergence_threshold = 1e6;  // |x_n| above this counts as diverged
  double outcome_factor = 1e6;        // ToZero / ToInfinity decision ratio
  int threads = 1;
};

struct McSummary {
  int n_traj = 0;
  int n_iter = 0;
  /// Median over trajectories of ln|x_n - b/a|, n = 0..n_iter (-inf for exact hits).
  std::vector<double> median_log_error;
  /// Least-squares slope of median_log_error over steps n_iter/2..n_iter
  /// (finite entries only; NaN when fewer than two remain).
  double slope = 0.0;
  double diverged_fraction = 0.0;
  double exact_fraction = 0.0;
  ScaledOutcome s_scaled_outcome = ScaledOutcome::Inconclusive;
};

/// Runs n_traj trajectories of the error recursion for a0*x = b0. Trajectory
/// i uses the uniform stream (seed, i).
McSummary mc_convergence(const CorrectionModel& model, double a0, double b0, double beta,
                         const McOptions& options);

void write_mc_json(std::ostream& out, const McSummary& summary,
                   const std::vector<std::string>& header_lines = {});
void write_mc_csv(std::ostream& out, const McSummary& summary,
                  const std::vector<std::string>& header_lines = {});

struct LogAbsNormalCheck {
  double estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;  // -(gamma + ln 2) / 2
};

/// Monte Carlo estimate of E ln|xi| for xi ~ N(0, 1). Requires n >= 1e5.
LogAbsNormalCheck log_abs_normal_mean_check(std::int64_t n_samples, std::uint64_t seed);

/// Boltzmann law over the symmetric support {+-sum 2^i q_i}, target b.
struct FullLine {};
/// Boltzmann law over the affine grid d1 + (d2 - d1) sum_{i=1}^{R} q_i 2^-i,
/// R = p - r of each supplied range.
struct Interval {
  double d1 = 0.0;
  double d2 = 2.0;
};
using LimitMode = std::variant<FullLine, Interval>;

struct LimitRow {
  BitRange range;
  std::size_t support_size = 0;
  double ks = 0.0;
};

/// Exact Kolmogorov-Smirnov distance between each finite Boltzmann law
/// B(beta, support, (a x - b)^2) and its normal (FullLine) or truncated-normal
/// (Interval) limit with mean b/a and variance 1/(2 a^2 beta^2). Ranges must
/// be ordered by nondecreasing p - r.
std::vector<LimitRow> limit_check(double a, double b, double beta,
                                  const std::vector<BitRange>& ranges, const LimitMode& mode);

void write_limit_csv(std::ostream& out, const std::vector<LimitRow>& rows,
                     const std::vector<std::string>& header_lines = {});

}  // namespace qalin
