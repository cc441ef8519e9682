#pragma once

// Convergence-rate functionals for the sign-factored refinement scheme:
//   r(u, a, beta)  = max_{c in [1, 2]} |1 - c a q(u, c, a, beta)|
//   E(a, beta)     = integral_0^1 ln r(u, a, beta) du
//   E_max(beta)    = max_{a in [1/2, 1]} E(a, beta)
// E < 0 implies almost-sure convergence of the iterates, and the error decays
// at least like s^-n for any s with ln s + E < 0.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qalin/sampler.hpp"

namespace qalin {

struct CGridSpec {
  int points = 257;
  bool refine = true;  // golden-section around the best grid point (continuous laws)
  double refine_tol = 1e-9;
};

/// Composite Gauss-Legendre: panels * order nodes; the check rule uses
/// check_panels * order nodes (0 disables the check).
struct QuadratureSpec {
  int panels = 16;
  int order = 16;
  int check_panels = 32;
  double check_tol = 1e-4;
};

struct AGridSpec {
  int points = 65;
  bool refine = true;
  int refine_iterations = 14;
};

struct RateOptions {
  CGridSpec c_grid;
  QuadratureSpec quadrature;
  AGridSpec a_grid;
  int threads = 1;
};

/// ln r is floored at ln(kRateFloor); hitting the floor sets `clamped`.
inline constexpr double kRateFloor = 1e-300;

/// Sign-free correction as a function of (u, c) for fixed a and beta.
using CorrectionFn = std::function<double(double u, double c)>;

double r_func(const CorrectionFn& q, double u, double a, const CGridSpec& grid = {});
/// Continuous models use grid + golden-section refinement; Boltzmann models
/// use the grid only (q is piecewise constant in c).
double r_func(const CorrectionModel& model, double u, double a, double beta,
              const CGridSpec& grid = {});

struct RateValue {
  double value = 0.0;
  bool clamped = false;
  /// |E(primary rule) - E(check rule)|; empty when no check ran (or for the
  /// exact piecewise Boltzmann integration).
  std::optional<double> check_delta;

  bool check_passed(double tol) const { return !check_delta || *check_delta <= tol; }
};

RateValue E_func(const CorrectionFn& q, double a, const QuadratureSpec& quad = {},
                 const CGridSpec& grid = {});
/// Continuous models: composite Gauss-Legendre. Boltzmann models: exact sum
/// over the pieces between all cdf levels of the per-c laws on the c-grid.
RateValue E_func(const CorrectionModel& model, double a, double beta,
                 const QuadratureSpec& quad = {}, const CGridSpec& grid = {});

struct EmaxValue {
  double value = 0.0;
  double argmax_a = 0.5;
  bool clamped = false;
  std::optional<double> check_delta;
};

EmaxValue E_max(const CorrectionModel& model, double beta, const RateOptions& options = {});

enum class RateKind { E, Emax };

struct RatePoint {
  std::string model_id;
  double beta = 0.0;
  std::optional<double> a;  // set for E rows only
  RateKind kind = RateKind::Emax;
  double value = 0.0;
  bool clamped = false;
};

/// E_max for every (model, beta), plus E rows for each entry of `a_values`.
/// Sorted by (model_id, beta, kind, a); independent of the thread count.
std::vector<RatePoint> rate_curve(const std::vector<CorrectionModel>& models,
                                  const std::vector<double>& betas,
                                  const RateOptions& options = {},
                                  const std::vector<double>& a_values = {});

/// Evenly spaced grid with `steps` points on [lo, hi] (steps == 1 gives lo).
std::vector<double> linear_grid(double lo, double hi, int steps);

/// Columns: model_id,beta,a,kind,value,clamped.
void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& points,
                    const std::vector<std::string>& header_lines = {});

}  // namespace qalin
