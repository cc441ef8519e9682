#include "qalin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "qalin/dist.hpp"
#include "qalin/errors.hpp"
#include "qalin/parallel.hpp"
#include "qalin/solver.hpp"
#include "qalin/uniform_stream.hpp"

namespace qalin {

std::string to_string(ScaledOutcome outcome) {
  switch (outcome) {
    case ScaledOutcome::ToZero: return "ToZero";
    case ScaledOutcome::ToInfinity: return "ToInfinity";
    case ScaledOutcome::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

double median(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  if (std::isinf(lower) && std::isinf(upper) && lower != upper) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isinf(lower)) return lower;
  return 0.5 * (lower + upper);
}

double ls_slope(const std::vector<double>& ys, std::size_t from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = from; i < ys.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    const double x = static_cast<double>(i);
    sx += x;
    sy += ys[i];
    sxx += x * x;
    sxy += x * ys[i];
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

McSummary mc_convergence(const CorrectionModel& model, double a0, double b0, double beta,
                         const McOptions& options) {
  if (!(options.s >= 1.0)) throw std::invalid_argument("scale factor s must be >= 1");
  if (options.n_traj < 1 || options.n_iter < 1) {
    throw std::invalid_argument("n_traj and n_iter must be positive");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  validate(model);
  const auto inst = normalize(a0, b0);
  const bool zero_l0 =
      options.zero_initial_exponent.value_or(std::holds_alternative<NormalModel>(model));
  const auto steps = static_cast<std::size_t>(options.n_iter);
  const auto trajs = static_cast<std::size_t>(options.n_traj);

  // log_err[t * (steps + 1) + n] = ln|e_n| for trajectory t.
  std::vector<double> log_err(trajs * (steps + 1));
  std::vector<char> diverged(trajs, 0);
  std::vector<char> exact(trajs, 0);
  const double target = inst.solution();

  parallel_for(trajs, options.threads, [&](std::size_t t) {
    const UniformStream stream(options.seed, t);
    std::vector<double> etas(steps);
    for (std::size_t n = 0; n < steps; ++n) etas[n] = stream(n);
    const auto path = error_recursion(inst, model, beta, etas, zero_l0);
    double* row = &log_err[t * (steps + 1)];
    for (std::size_t n = 0; n <= steps; ++n) {
      // A path stops early at an exact hit (error stays 0) or on overflow
      // (error stays at its last, huge, value).
      const double e = n < path.error.size() ? path.error[n] : path.error.back();
      row[n] = e == 0.0 ? -INFINITY : std::log(std::abs(e));
      if (!(std::abs(target + e) <= options.divergence_threshold)) diverged[t] = 1;
    }
    exact[t] = path.exact ? 1 : 0;
  });

  McSummary out;
  out.n_traj = options.n_traj;
  out.n_iter = options.n_iter;
  out.median_log_error.resize(steps + 1);
  std::vector<double> column(trajs);
  for (std::size_t n = 0; n <= steps; ++n) {
    for (std::size_t t = 0; t < trajs; ++t) column[t] = log_err[t * (steps + 1) + n];
    out.median_log_error[n] = median(column);
  }
  out.slope = ls_slope(out.median_log_error, steps / 2);
  out.diverged_fraction =
      static_cast<double>(std::count(diverged.begin(), diverged.end(), 1)) / options.n_traj;
  out.exact_fraction =
      static_cast<double>(std::count(exact.begin(), exact.end(), 1)) / options.n_traj;

  const double initial = out.median_log_error.front();
  const double scaled_final =
      static_cast<double>(options.n_iter) * std::log(options.s) + out.median_log_error.back();
  const double margin = std::log(options.outcome_factor);
  if (scaled_final < initial - margin) {
    out.s_scaled_outcome = ScaledOutcome::ToZero;
  } else if (scaled_final > initial + margin) {
    out.s_scaled_outcome = ScaledOutcome::ToInfinity;
  }
  return out;
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_mc_json(std::ostream& out, const McSummary& summary,
                   const std::vector<std::string>& header_lines) {
  nlohmann::json doc;
  doc["config"] = header_lines;
  doc["n_traj"] = summary.n_traj;
  doc["n_iter"] = summary.n_iter;
  auto med = nlohmann::json::array();
  for (double v : summary.median_log_error) med.push_back(finite_or_null(v));
  doc["median_log_error"] = std::move(med);
  doc["slope"] = finite_or_null(summary.slope);
  doc["diverged_fraction"] = summary.diverged_fraction;
  doc["exact_fraction"] = summary.exact_fraction;
  doc["s_scaled_outcome"] = to_string(summary.s_scaled_outcome);
  out << doc.dump(2) << '\n';
}

void write_mc_csv(std::ostream& out, const McSummary& summary,
                  const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# n_traj=" << summary.n_traj << " n_iter=" << summary.n_iter
      << " slope=" << fmt(summary.slope) << " diverged_fraction=" << fmt(summary.diverged_fraction)
      << " exact_fraction=" << fmt(summary.exact_fraction)
      << " outcome=" << to_string(summary.s_scaled_outcome) << '\n';
  out << "n,median_log_error\n";
  for (std::size_t n = 0; n < summary.median_log_error.size(); ++n) {
    out << n << ',' << fmt(summary.median_log_error[n]) << '\n';
  }
}

LogAbsNormalCheck log_abs_normal_mean_check(std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 100000) throw std::invalid_argument("log_abs_normal_mean_check needs n >= 1e5");
  const UniformStream stream(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const double v = std::log(std::abs(std_normal_quantile(stream(static_cast<std::uint64_t>(k)))));
    const double d = v - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (v - mean);
  }
  LogAbsNormalCheck out;
  out.estimate = mean;
  out.std_error = std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples));
  out.closed_form = -(kEulerGamma + std::numbers::ln2) / 2.0;
  return out;
}

std::vector<LimitRow> limit_check(double a, double b, double beta,
                                  const std::vector<BitRange>& ranges, const LimitMode& mode) {
  if (a == 0.0) throw DegenerateProblem("limit_check requires a != 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double mu = b / a;
  const double sigma = 1.0 / (std::numbers::sqrt2 * std::abs(a) * beta);

  std::vector<LimitRow> rows;
  int previous_width = std::numeric_limits<int>::min();
  for (const auto& range : ranges) {
    validate(range);
    if (range.width() < previous_width) {
      throw std::invalid_argument("limit_check ranges must be ordered by increasing p - r");
    }
    previous_width = range.width();
    if (range.width() > kMaxEnumerationWidth - 1) {
      throw ResourceLimit("limit_check enumeration limited to p - r <= " +
                          std::to_string(kMaxEnumerationWidth - 1));
    }

    std::vector<double> support;
    std::function<double(double)> limit_cdf;
    if (std::holds_alternative<FullLine>(mode)) {
      support = enumerate_support({SupportKind::SignedSymmetric, range});
      limit_cdf = [=](double x) { return normal_cdf((x - mu) / sigma); };
    } else {
      const auto& iv = std::get<Interval>(mode);
      const TruncNormalParams params = TruncNormalParams{mu, sigma, iv.d1, iv.d2}.normalized();
      const std::size_t count = std::size_t{1} << range.width();
      const double step = std::ldexp(params.d2 - params.d1, -range.width());
      support.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        support[k] = params.d1 + step * static_cast<double>(k);
      }
      limit_cdf = [params](double x) { return trunc_normal_cdf(params, x); };
    }

    const auto dist = boltzmann_dist(beta, support, b, a);
    double ks = 0.0;
    double below = 0.0;  // discrete cdf just left of support[k]
    for (std::size_t k = 0; k < dist.size(); ++k) {
      const double f = limit_cdf(dist.support[k]);
      ks = std::max({ks, std::abs(dist.cdf[k] - f), std::abs(below - f)});
      below = dist.cdf[k];
    }
    rows.push_back({range, dist.size(), ks});
  }
  return rows;
}

void write_limit_csv(std::ostream& out, const std::vector<LimitRow>& rows,
                     const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "r,p,width,support_size,ks\n";
  for (const auto& row : rows) {
    out << row.range.r << ',' << row.range.p << ',' << row.range.width() << ','
        << row.support_size << ',' << fmt(row.ks) << '\n';
  }
}

}  // namespace qalin
