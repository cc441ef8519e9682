#include "qalin/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace qalin {

BoltzmannModel::BoltzmannModel(SupportKind kind, BitRange range) : kind_(kind), range_(range) {
  if (kind == SupportKind::TwosComplement) {
    throw std::invalid_argument("Boltzmann correction models use signed or positive supports");
  }
  validate(range);
  if (range.p > 1) {
    throw std::invalid_argument("Boltzmann correction range requires p <= 1");
  }
  support_ = std::make_shared<const std::vector<double>>(enumerate_support({kind, range}));
}

DiscreteDist BoltzmannModel::law(double c, double a, double beta) const {
  return boltzmann_dist(beta, *support_, 1.0 / c, a);
}

CorrectionModel preset(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::A1: return TruncNormalModel{-2.0, 2.0};
    case Algorithm::A2: return TruncNormalModel{0.0, 2.0};
    case Algorithm::A3: return TruncNormalModel{0.5, 2.0};
    case Algorithm::A4: return TruncNormalModel{0.5, 1.0};
  }
  throw std::invalid_argument("unknown algorithm preset");
}

void validate(const CorrectionModel& model) {
  if (const auto* t = std::get_if<TruncNormalModel>(&model)) {
    if (!std::isfinite(t->d1) || !std::isfinite(t->d2) || t->d1 == t->d2) {
      throw std::invalid_argument("truncated-normal model requires finite d1 != d2");
    }
  }
}

bool is_continuous(const CorrectionModel& model) {
  return !std::holds_alternative<BoltzmannModel>(model);
}

namespace {

std::string short_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that still round-trips.
  for (int digits = 1; digits < 17; ++digits) {
    char trial[40];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    if (std::strtod(trial, nullptr) == v) return trial;
  }
  return buf;
}

}  // namespace

std::string model_id(const CorrectionModel& model) {
  if (std::holds_alternative<NormalModel>(model)) return "normal";
  if (const auto* t = std::get_if<TruncNormalModel>(&model)) {
    for (auto alg : {Algorithm::A1, Algorithm::A2, Algorithm::A3, Algorithm::A4}) {
      if (std::get<TruncNormalModel>(preset(alg)) == *t) {
        return "a" + std::to_string(static_cast<int>(alg) + 1);
      }
    }
    return "trunc:d1=" + short_double(t->d1) + ":d2=" + short_double(t->d2);
  }
  const auto& b = std::get<BoltzmannModel>(model);
  return "boltzmann:" + to_string(b.kind()) + ":r=" + std::to_string(b.range().r) +
         ":p=" + std::to_string(b.range().p);
}

double q_value(const CorrectionModel& model, double u, double c, double a, double beta) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("uniform level must be in [0, 1]");
  if (!(c > 0.0)) throw std::invalid_argument("normalized residual c must be positive");
  if (a == 0.0) throw std::invalid_argument("coefficient a must be nonzero");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

  const double mean = 1.0 / (a * c);
  const double sigma = 1.0 / (std::numbers::sqrt2 * std::abs(a) * beta);
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NormalModel>) {
          const double level = std::clamp(u, kNormalLevelClamp, 1.0 - kNormalLevelClamp);
          return mean + sigma * std_normal_quantile(level);
        } else if constexpr (std::is_same_v<M, TruncNormalModel>) {
          return trunc_normal_quantile({mean, sigma, m.d1, m.d2}, u);
        } else {
          return quantile(m.law(c, a, beta), u);
        }
      },
      model);
}

}  // namespace qalin
