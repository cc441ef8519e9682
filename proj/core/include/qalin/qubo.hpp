#pragma once

// QUBO form of H(x) = (a*x - b)^2 with x in the two's-complement encoding.
// Bits are addressed by their exponent i in [r, p]; the constant b^2 is kept
// separately as `offset` so that evaluate(q) + offset == (a*decode(q) - b)^2.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qalin/encoding.hpp"

namespace qalin {

struct QuboEntry {
  int i = 0;
  int j = 0;
  double value = 0.0;

  friend bool operator==(const QuboEntry&, const QuboEntry&) = default;
};

class QuboProblem {
 public:
  QuboProblem() = default;
  QuboProblem(BitRange range, double a, double b, double offset);

  const BitRange& range() const noexcept { return range_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double offset() const noexcept { return offset_; }
  int size() const noexcept { return range_.width() + 1; }

  /// Q_ij for r <= i <= j <= p; zero entries are stored.
  double coefficient(int i, int j) const;
  void set_coefficient(int i, int j, double value);

  /// Upper-triangular entries with nonzero value, ordered by (i, j).
  std::vector<QuboEntry> nonzero_entries() const;

  friend bool operator==(const QuboProblem&, const QuboProblem&) = default;

 private:
  std::size_t index(int i, int j) const;

  BitRange range_;
  double a_ = 0.0;
  double b_ = 0.0;
  double offset_ = 0.0;
  std::vector<double> coeffs_;  // dense size() x size(), upper triangle used
};

/// Closed-form coefficients. Throws DegenerateProblem when a == 0.
QuboProblem build_qubo(double a, double b, BitRange range);

/// sum_{i<=j} Q_ij q_i q_j. Throws std::invalid_argument on length mismatch.
double evaluate(const QuboProblem& problem, std::span<const std::uint8_t> bits);
double evaluate_pattern(const QuboProblem& problem, std::uint64_t pattern);

/// Exhaustive max |evaluate(q) + offset - (a*decode(q) - b)^2| over all
/// assignments. Requires at most 30 qubits.
double max_identity_deviation(const QuboProblem& problem);

enum class QuboFormat { CooText, Json };

/// Header lines become leading "# " comments (COO) or a "config" array (JSON).
void export_qubo(const QuboProblem& problem, QuboFormat format, std::ostream& out,
                 const std::vector<std::string>& header_lines = {});
QuboProblem import_qubo(std::istream& in, QuboFormat format);

}  // namespace qalin
