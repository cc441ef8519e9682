#pragma once

// Probability kernels: Boltzmann laws on finite supports, normal and
// truncated-normal quantiles, and the error-function pair they rest on.

#include <span>
#include <vector>

namespace qalin {

/// Finite distribution on a strictly increasing support. cdf.back() is 1.
struct DiscreteDist {
  std::vector<double> support;
  std::vector<double> pmf;
  std::vector<double> cdf;

  std::size_t size() const noexcept { return support.size(); }
};

/// Builds a DiscreteDist from nonnegative weights (normalized here).
DiscreteDist make_discrete(std::vector<double> support, std::span<const double> weights);

/// P(v) proportional to exp(-beta^2 * (a*v - target)^2). The exponent is
/// shifted by min H before exponentiation; far tails may underflow to an
/// exact zero mass.
DiscreteDist boltzmann_dist(double beta, std::span<const double> support, double target,
                            double a);

/// Smallest support value whose cdf >= u. At u == 0 this is the smallest
/// value with positive mass; at u == 1 the largest.
double quantile(const DiscreteDist& dist, double u);
std::size_t quantile_index(const DiscreteDist& dist, double u);

double erf(double x);
/// Inverse error function; throws std::invalid_argument unless |y| < 1.
double erfinv(double y);

/// Standard normal cdf.
double normal_cdf(double x);
/// Phi^{-1}(u); throws std::invalid_argument unless 0 < u < 1.
double std_normal_quantile(double u);

/// Normal law N(mu, sigma^2) conditioned on the open interval (d1, d2).
struct TruncNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
  double d1 = -1.0;
  double d2 = 1.0;

  /// Swaps d1 > d2 and checks sigma > 0, d1 != d2.
  TruncNormalParams normalized() const;
};

/// u-quantile of the truncated normal, always inside [d1, d2]:
///   mu + sigma*sqrt(2)*erfinv((1-u)*erf(alpha) + u*erf(beta))
/// with alpha = (d1-mu)/(sigma*sqrt 2), beta = (d2-mu)/(sigma*sqrt 2). When
/// both bounds sit in the same tail the identical expression is evaluated
/// through erfc to keep precision.
double trunc_normal_quantile(const TruncNormalParams& params, double u);

/// CDF of the truncated normal; 0 below d1 and 1 above d2.
double trunc_normal_cdf(const TruncNormalParams& params, double x);

}  // namespace qalin
