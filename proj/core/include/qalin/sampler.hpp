#pragma once

// Correction laws q(u, c, a, beta): the sign-free scaled correction returned
// by the annealer surrogate for a uniform variate u, normalized residual c,
// normalized coefficient a and precision beta. The residual's sign is applied
// by the solver.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qalin/dist.hpp"
#include "qalin/encoding.hpp"

namespace qalin {

/// Correction ~ N(1/(a c), 1/(2 a^2 beta^2)).
struct NormalModel {
  friend bool operator==(const NormalModel&, const NormalModel&) = default;
};

/// Correction ~ N(1/(a c), 1/(2 a^2 beta^2)) conditioned on (d1, d2).
struct TruncNormalModel {
  double d1 = 0.0;
  double d2 = 2.0;

  friend bool operator==(const TruncNormalModel&, const TruncNormalModel&) = default;
};

/// Correction ~ Boltzmann(beta, support, (a v - 1/c)^2) over a finite
/// signed-symmetric or positive support with p <= 1.
class BoltzmannModel {
 public:
  BoltzmannModel(SupportKind kind, BitRange range);

  SupportKind kind() const noexcept { return kind_; }
  const BitRange& range() const noexcept { return range_; }
  const std::vector<double>& support() const noexcept { return *support_; }
  int qubits() const { return qubit_count({kind_, range_}); }

  /// Correction law for a given normalized residual.
  DiscreteDist law(double c, double a, double beta) const;

  friend bool operator==(const BoltzmannModel& x, const BoltzmannModel& y) {
    return x.kind_ == y.kind_ && x.range_ == y.range_;
  }

 private:
  SupportKind kind_;
  BitRange range_;
  std::shared_ptr<const std::vector<double>> support_;
};

using CorrectionModel = std::variant<NormalModel, TruncNormalModel, BoltzmannModel>;

/// Truncated-normal presets: A1 (-2, 2), A2 (0, 2), A3 (1/2, 2), A4 (1/2, 1).
enum class Algorithm { A1, A2, A3, A4 };

CorrectionModel preset(Algorithm algorithm);

/// Throws std::invalid_argument for an unusable model.
void validate(const CorrectionModel& model);

/// Stable textual id, e.g. "normal", "a2", "trunc:d1=-1:d2=1",
/// "boltzmann:positive:r=-1:p=1". parse_model(model_id(m)) == m.
std::string model_id(const CorrectionModel& model);

bool is_continuous(const CorrectionModel& model);

/// Levels used for the unbounded normal law are clamped to this distance from
/// 0 and 1.
inline constexpr double kNormalLevelClamp = 1e-15;

/// The correction for uniform level u in [0, 1]. Requires c > 0, a != 0 and
/// beta > 0.
double q_value(const CorrectionModel& model, double u, double c, double a, double beta);

}  // namespace qalin
