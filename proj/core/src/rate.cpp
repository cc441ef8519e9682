#include "qalin/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "qalin/parallel.hpp"
#include "qalin/quadrature.hpp"

namespace qalin {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt 5 - 1) / 2
constexpr double kExactMultiplier = 4.0 * std::numeric_limits<double>::epsilon();

double c_at(const CGridSpec& grid, int k) {
  return grid.points == 1 ? 1.0 : 1.0 + static_cast<double>(k) / (grid.points - 1);
}

void check_grid(const CGridSpec& grid) {
  if (grid.points < 2) throw std::invalid_argument("c-grid needs at least 2 points");
}

// Maximizes f on [lo, hi] by golden-section search; returns the best value seen.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  double best_x = f1 >= f2 ? x1 : x2;
  double best = std::max(f1, f2);
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
      if (f1 > best) best = f1, best_x = x1;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
      if (f2 > best) best = f2, best_x = x2;
    }
  }
  return {best_x, best};
}

double log_floored(double r, bool& clamped) {
  if (!(r > kRateFloor)) {
    clamped = true;
    return std::log(kRateFloor);
  }
  return std::log(r);
}

double r_grid(const CorrectionFn& q, double u, double a, const CGridSpec& grid, bool refine) {
  check_grid(grid);
  auto f = [&](double c) { return std::abs(1.0 - c * a * q(u, c)); };
  int best_k = 0;
  double best = -1.0;
  for (int k = 0; k < grid.points; ++k) {
    const double v = f(c_at(grid, k));
    if (v > best) best = v, best_k = k;
  }
  if (refine) {
    const double lo = c_at(grid, std::max(best_k - 1, 0));
    const double hi = c_at(grid, std::min(best_k + 1, grid.points - 1));
    best = std::max(best, golden_max(f, lo, hi, grid.refine_tol).second);
  }
  // A multiplier at rounding level of c*a*q is indistinguishable from an exact correction.
  return best <= kExactMultiplier ? 0.0 : best;
}

CorrectionFn bind(const CorrectionModel& model, double a, double beta) {
  return [model, a, beta](double u, double c) { return q_value(model, u, c, a, beta); };
}

RateValue integrate_log_r(const std::function<double(double)>& r, const QuadratureSpec& quad) {
  auto integrate = [&](int panels, bool& clamped) {
    const auto rule = composite_gauss_legendre(0.0, 1.0, panels, quad.order);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      total += rule.weights[i] * log_floored(r(rule.nodes[i]), clamped);
    }
    return total;
  };
  RateValue out;
  out.value = integrate(quad.panels, out.clamped);
  if (quad.check_panels > 0) {
    bool check_clamped = false;
    out.check_delta = std::abs(integrate(quad.check_panels, check_clamped) - out.value);
  }
  return out;
}

// Exact integral of ln r for piecewise-constant Boltzmann quantiles.
RateValue boltzmann_E(const BoltzmannModel& model, double a, double beta, const CGridSpec& grid) {
  check_grid(grid);
  std::vector<DiscreteDist> laws;
  laws.reserve(static_cast<std::size_t>(grid.points));
  std::vector<double> levels{0.0, 1.0};
  for (int k = 0; k < grid.points; ++k) {
    laws.push_back(model.law(c_at(grid, k), a, beta));
    const auto& cdf = laws.back().cdf;
    levels.insert(levels.end(), cdf.begin(), cdf.end() - 1);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<std::size_t> cursor(laws.size(), 0);
  RateValue out;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double len = levels[j + 1] - levels[j];
    if (!(len > 0.0)) continue;
    const double mid = levels[j] + 0.5 * len;
    double r = 0.0;
    for (std::size_t k = 0; k < laws.size(); ++k) {
      const auto& law = laws[k];
      while (cursor[k] + 1 < law.size() && law.cdf[cursor[k]] < mid) ++cursor[k];
      const double c = c_at(grid, static_cast<int>(k));
      r = std::max(r, std::abs(1.0 - c * a * law.support[cursor[k]]));
    }
    total += len * log_floored(r, out.clamped);
  }
  out.value = total;
  return out;
}

}  // namespace

double r_func(const CorrectionFn& q, double u, double a, const CGridSpec& grid) {
  return r_grid(q, u, a, grid, grid.refine);
}

double r_func(const CorrectionModel& model, double u, double a, double beta,
              const CGridSpec& grid) {
  validate(model);
  return r_grid(bind(model, a, beta), u, a, grid, grid.refine && is_continuous(model));
}

RateValue E_func(const CorrectionFn& q, double a, const QuadratureSpec& quad,
                 const CGridSpec& grid) {
  return integrate_log_r([&](double u) { return r_func(q, u, a, grid); }, quad);
}

RateValue E_func(const CorrectionModel& model, double a, double beta, const QuadratureSpec& quad,
                 const CGridSpec& grid) {
  validate(model);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (const auto* b = std::get_if<BoltzmannModel>(&model)) {
    return boltzmann_E(*b, a, beta, grid);
  }
  const auto q = bind(model, a, beta);
  return integrate_log_r([&](double u) { return r_grid(q, u, a, grid, grid.refine); }, quad);
}

EmaxValue E_max(const CorrectionModel& model, double beta, const RateOptions& options) {
  const auto& ag = options.a_grid;
  if (ag.points < 2) throw std::invalid_argument("a-grid needs at least 2 points");
  QuadratureSpec scan = options.quadrature;
  scan.check_panels = 0;

  const auto as = linear_grid(0.5, 1.0, ag.points);
  std::vector<RateValue> values(as.size());
  parallel_for(as.size(), options.threads, [&](std::size_t i) {
    values[i] = E_func(model, as[i], beta, scan, options.c_grid);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].value > values[best].value) best = i;
  }
  EmaxValue out{values[best].value, as[best], values[best].clamped, std::nullopt};

  if (ag.refine) {
    double lo = as[best == 0 ? 0 : best - 1];
    double hi = as[std::min(best + 1, as.size() - 1)];
    bool clamped = false;
    auto f = [&](double a) {
      const auto v = E_func(model, a, beta, scan, options.c_grid);
      clamped = clamped || v.clamped;
      return v.value;
    };
    const auto [x, v] = golden_max(f, lo, hi, 0.0, ag.refine_iterations);
    if (v > out.value) {
      out.value = v;
      out.argmax_a = x;
      out.clamped = clamped;
    }
  }

  if (options.quadrature.check_panels > 0 && is_continuous(model)) {
    const auto checked = E_func(model, out.argmax_a, beta, options.quadrature, options.c_grid);
    out.check_delta = checked.check_delta;
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    grid[static_cast<std::size_t>(i)] =
        steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  }
  return grid;
}

std::vector<RatePoint> rate_curve(const std::vector<CorrectionModel>& models,
                                  const std::vector<double>& betas, const RateOptions& options,
                                  const std::vector<double>& a_values) {
  struct Cell {
    std::size_t model;
    double beta;
    std::optional<double> a;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (double beta : betas) {
      cells.push_back({m, beta, std::nullopt});
      for (double a : a_values) cells.push_back({m, beta, a});
    }
  }

  RateOptions inner = options;
  inner.threads = 1;
  std::vector<RatePoint> points(cells.size());
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    const auto& cell = cells[i];
    const auto& model = models[cell.model];
    RatePoint pt;
    pt.model_id = model_id(model);
    pt.beta = cell.beta;
    pt.a = cell.a;
    if (cell.a) {
      const auto v = E_func(model, *cell.a, cell.beta, inner.quadrature, inner.c_grid);
      pt.kind = RateKind::E;
      pt.value = v.value;
      pt.clamped = v.clamped;
    } else {
      const auto v = E_max(model, cell.beta, inner);
      pt.kind = RateKind::Emax;
      pt.value = v.value;
      pt.clamped = v.clamped;
    }
    points[i] = std::move(pt);
  });

  std::stable_sort(points.begin(), points.end(), [](const RatePoint& x, const RatePoint& y) {
    const auto kx = x.kind == RateKind::Emax ? 0 : 1;
    const auto ky = y.kind == RateKind::Emax ? 0 : 1;
    return std::tie(x.model_id, x.beta, kx, x.a) < std::tie(y.model_id, y.beta, ky, y.a);
  });
  return points;
}

void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& points,
                    const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "model_id,beta,a,kind,value,clamped\n";
  char buf[40];
  for (const auto& p : points) {
    out << p.model_id << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.beta);
    out << buf << ',';
    if (p.a) {
      std::snprintf(buf, sizeof buf, "%.17g", *p.a);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", p.value);
    out << ',' << (p.kind == RateKind::E ? "E" : "Emax") << ',' << buf << ','
        << (p.clamped ? 1 : 0) << '\n';
  }
}

}  // namespace qalin
