#include "qalin/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qalin/errors.hpp"

namespace qalin {

void validate(const BitRange& range) {
  if (range.r >= range.p) {
    throw std::invalid_argument("bit range requires r < p (got r=" + std::to_string(range.r) +
                                ", p=" + std::to_string(range.p) + ")");
  }
  if (range.width() > kMaxExactWidth) {
    throw std::invalid_argument("bit range width p - r exceeds " +
                                std::to_string(kMaxExactWidth));
  }
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::TwosComplement: return "twos";
    case SupportKind::SignedSymmetric: return "signed";
    case SupportKind::Positive: return "positive";
  }
  return "unknown";
}

int qubit_count(const SupportSpec& spec) {
  validate(spec.range);
  return spec.kind == SupportKind::Positive ? spec.range.width() : spec.range.width() + 1;
}

double sign_weight(const BitRange& range) {
  return -std::ldexp(1.0, range.p) + std::ldexp(1.0, range.r);
}

double support_max(const SupportSpec& spec) {
  validate(spec.range);
  return std::ldexp(1.0, spec.range.p) - std::ldexp(1.0, spec.range.r);
}

double support_min(const SupportSpec& spec) {
  return spec.kind == SupportKind::Positive ? 0.0 : -support_max(spec);
}

namespace {

// Magnitude bits q_r..q_{p-1} read as an integer count of 2^r units.
double magnitude(std::uint64_t pattern, const BitRange& range) {
  const std::uint64_t mask = (std::uint64_t{1} << range.width()) - 1;
  return std::ldexp(static_cast<double>(pattern & mask), range.r);
}

void require_enumerable(const SupportSpec& spec) {
  validate(spec.range);
  if (spec.range.width() > kMaxEnumerationWidth) {
    throw ResourceLimit("support enumeration limited to p - r <= " +
                        std::to_string(kMaxEnumerationWidth));
  }
}

}  // namespace

double decode_pattern(std::uint64_t pattern, const SupportSpec& spec) {
  validate(spec.range);
  const auto& range = spec.range;
  const double mag = magnitude(pattern, range);
  const bool top = ((pattern >> range.width()) & 1U) != 0;
  switch (spec.kind) {
    case SupportKind::Positive: return mag;
    case SupportKind::SignedSymmetric: return top ? -mag : mag;
    case SupportKind::TwosComplement: return top ? sign_weight(range) + mag : mag;
  }
  return mag;
}

double decode(std::span<const std::uint8_t> bits, const SupportSpec& spec) {
  const int n = qubit_count(spec);
  if (static_cast<int>(bits.size()) != n) {
    throw std::invalid_argument("bit vector length " + std::to_string(bits.size()) +
                                " does not match qubit count " + std::to_string(n));
  }
  if (n > 63) {
    throw std::invalid_argument("bit vector too long");
  }
  std::uint64_t pattern = 0;
  for (int k = 0; k < n; ++k) {
    if (bits[k] > 1) {
      throw std::invalid_argument("bit values must be 0 or 1");
    }
    pattern |= static_cast<std::uint64_t>(bits[k]) << k;
  }
  return decode_pattern(pattern, spec);
}

std::vector<double> enumerate_support(const SupportSpec& spec) {
  require_enumerable(spec);
  if (spec.kind == SupportKind::TwosComplement) {
    auto values = enumerate_patterns(spec);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
  }
  const auto& range = spec.range;
  const std::int64_t top = (std::int64_t{1} << range.width()) - 1;
  const std::int64_t lo = spec.kind == SupportKind::Positive ? 0 : -top;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(top - lo + 1));
  for (std::int64_t k = lo; k <= top; ++k) {
    values.push_back(std::ldexp(static_cast<double>(k), range.r));
  }
  return values;
}

std::vector<double> enumerate_patterns(const SupportSpec& spec) {
  require_enumerable(spec);
  const int n = qubit_count(spec);
  if (n > kMaxEnumerationWidth) {
    throw ResourceLimit("pattern enumeration limited to " +
                        std::to_string(kMaxEnumerationWidth) + " qubits");
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> values(count);
  for (std::uint64_t pattern = 0; pattern < count; ++pattern) {
    values[pattern] = decode_pattern(pattern, spec);
  }
  return values;
}

}  // namespace qalin
