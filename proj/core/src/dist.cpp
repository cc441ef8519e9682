#include "qalin/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace qalin {

DiscreteDist make_discrete(std::vector<double> support, std::span<const double> weights) {
  if (support.empty()) throw std::invalid_argument("distribution support is empty");
  if (weights.size() != support.size()) {
    throw std::invalid_argument("weights and support differ in length");
  }
  for (std::size_t k = 1; k < support.size(); ++k) {
    if (!(support[k - 1] < support[k])) {
      throw std::invalid_argument("support must be strictly increasing");
    }
  }
  DiscreteDist dist;
  dist.support = std::move(support);
  dist.pmf.resize(weights.size());
  dist.cdf.resize(weights.size());
  double running = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    running += weights[k];
    dist.cdf[k] = running;
  }
  if (!(running > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    dist.pmf[k] = weights[k] / running;
    dist.cdf[k] /= running;
  }
  dist.cdf.back() = 1.0;
  return dist;
}

DiscreteDist boltzmann_dist(double beta, std::span<const double> support, double target,
                            double a) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (a == 0.0) throw std::invalid_argument("Boltzmann law requires a != 0");
  if (support.empty()) throw std::invalid_argument("distribution support is empty");

  std::vector<double> energy(support.size());
  double min_energy = INFINITY;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double d = a * support[k] - target;
    energy[k] = d * d;
    min_energy = std::min(min_energy, energy[k]);
  }
  const double b2 = beta * beta;
  for (auto& e : energy) e = std::exp(-b2 * (e - min_energy));
  return make_discrete(std::vector<double>(support.begin(), support.end()), energy);
}

std::size_t quantile_index(const DiscreteDist& dist, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  if (u == 0.0) {
    auto it = std::find_if(dist.pmf.begin(), dist.pmf.end(), [](double m) { return m > 0.0; });
    return static_cast<std::size_t>(it - dist.pmf.begin());
  }
  auto it = std::lower_bound(dist.cdf.begin(), dist.cdf.end(), u);
  return it == dist.cdf.end() ? dist.size() - 1 : static_cast<std::size_t>(it - dist.cdf.begin());
}

double quantile(const DiscreteDist& dist, double u) { return dist.support[quantile_index(dist, u)]; }

double erf(double x) { return std::erf(x); }

double erfinv(double y) {
  if (!(std::abs(y) < 1.0)) {
    throw std::invalid_argument("erfinv argument must satisfy |y| < 1");
  }
  return boost::math::erf_inv(y);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("normal quantile level must be in (0, 1)");
  }
  // erfc_inv keeps full relative precision in the lower tail.
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

TruncNormalParams TruncNormalParams::normalized() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("truncated normal requires sigma > 0");
  if (d1 == d2) throw std::invalid_argument("truncated normal requires d1 != d2");
  TruncNormalParams out = *this;
  if (out.d1 > out.d2) std::swap(out.d1, out.d2);
  return out;
}

namespace {

// Largest magnitude passed to erf^{-1}; keeps endpoint quantiles finite.
constexpr double kErfClamp = 1.0 - 1e-16;

}  // namespace

double trunc_normal_quantile(const TruncNormalParams& params, double u) {
  const auto t = params.normalized();
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  if (u == 0.0) return t.d1;
  if (u == 1.0) return t.d2;

  const double scale = t.sigma * std::numbers::sqrt2;
  const double lo = (t.d1 - t.mu) / scale;
  const double hi = (t.d2 - t.mu) / scale;

  double z = 0.0;
  if (lo >= 0.0) {
    // Upper tail: erf(x) = 1 - erfc(x).
    const double mass = (1.0 - u) * std::erfc(lo) + u * std::erfc(hi);
    z = mass > 0.0 ? boost::math::erfc_inv(mass) : lo;
  } else if (hi <= 0.0) {
    // Lower tail: erf(x) = erfc(-x) - 1.
    const double mass = (1.0 - u) * std::erfc(-lo) + u * std::erfc(-hi);
    z = mass > 0.0 ? -boost::math::erfc_inv(mass) : hi;
  } else {
    const double y = std::clamp((1.0 - u) * std::erf(lo) + u * std::erf(hi), -kErfClamp,
                                kErfClamp);
    z = boost::math::erf_inv(y);
  }
  return std::clamp(t.mu + scale * z, t.d1, t.d2);
}

double trunc_normal_cdf(const TruncNormalParams& params, double x) {
  const auto t = params.normalized();
  if (x <= t.d1) return 0.0;
  if (x >= t.d2) return 1.0;
  const double scale = t.sigma * std::numbers::sqrt2;
  const double lo = (t.d1 - t.mu) / scale;
  const double hi = (t.d2 - t.mu) / scale;
  const double z = (x - t.mu) / scale;
  if (lo >= 0.0) {
    return (std::erfc(lo) - std::erfc(z)) / (std::erfc(lo) - std::erfc(hi));
  }
  if (hi <= 0.0) {
    return (std::erfc(-z) - std::erfc(-lo)) / (std::erfc(-hi) - std::erfc(-lo));
  }
  return (std::erf(z) - std::erf(lo)) / (std::erf(hi) - std::erf(lo));
}

}  // namespace qalin
