#pragma once

// Fixed-point binary encodings of a real variable and the finite value sets
// they generate.
//
// Bit vectors are ordered from the lowest exponent upward: bits[k] is the
// coefficient of 2^(r+k). For the two's-complement kind the final entry is the
// sign bit q_p, weighted by theta = -2^p + 2^r. For the signed-symmetric kind
// the final entry is a sign flag applied to the magnitude sum.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qalin {

/// Inclusive bit exponents r < p.
struct BitRange {
  int r = 0;
  int p = 1;

  int width() const noexcept { return p - r; }
  friend bool operator==(const BitRange&, const BitRange&) = default;
};

enum class SupportKind {
  TwosComplement,   // theta*q_p + sum_{i=r}^{p-1} 2^i q_i
  SignedSymmetric,  // {+-sum_{i=r}^{p-1} 2^i q_i}
  Positive,         // {sum_{i=r}^{p-1} 2^i q_i}
};

struct SupportSpec {
  SupportKind kind = SupportKind::Positive;
  BitRange range;

  friend bool operator==(const SupportSpec&, const SupportSpec&) = default;
};

/// Largest p - r for which decoded values are exact dyadic doubles.
inline constexpr int kMaxExactWidth = 50;
/// Largest p - r accepted by the enumeration routines.
inline constexpr int kMaxEnumerationWidth = 30;

/// Throws std::invalid_argument unless r < p and p - r <= kMaxExactWidth.
void validate(const BitRange& range);

std::string to_string(SupportKind kind);

/// Number of binary variables used by the encoding.
int qubit_count(const SupportSpec& spec);

/// theta = -2^p + 2^r, the weight of the two's-complement sign bit.
double sign_weight(const BitRange& range);

/// Closed-form value bounds; every decoded value lies in [min, max].
double support_min(const SupportSpec& spec);
double support_max(const SupportSpec& spec);

/// Value represented by a bit vector. Throws std::invalid_argument when the
/// length differs from qubit_count(spec).
double decode(std::span<const std::uint8_t> bits, const SupportSpec& spec);

/// Same as decode, reading bit k of `pattern` as bits[k].
double decode_pattern(std::uint64_t pattern, const SupportSpec& spec);

/// Strictly increasing list of distinct representable values. Throws
/// ResourceLimit when p - r > kMaxEnumerationWidth.
std::vector<double> enumerate_support(const SupportSpec& spec);

/// Decoded value of every bit pattern, indexed by pattern (bit k of the index
/// is bits[k]); repeated values are kept. Requires qubit_count(spec) <= 30.
std::vector<double> enumerate_patterns(const SupportSpec& spec);

}  // namespace qalin
