#pragma once

// Minimum-description-length induction over a fixed, finite rule class.
//
// Rules and their description lengths (b = ceil(log2 n_outcomes)):
//   constant(k)              2 + b bits
//   periodic(pattern, p<=8)  2 + 3 + p*b bits
//   iid(a_0/64, ...)         2 + 6*n_outcomes bits
// Data term: ceil(-log2 likelihood(prefix | rule)).
//
// The induced rule minimizes total bits. Ties go to the shorter description,
// then class order (constant < periodic < iid), then higher exact likelihood,
// then lexicographically smaller parameters.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "precedence/rng.hpp"

namespace precedence::rules {

enum class RuleClass { constant = 0, periodic = 1, iid = 2 };

const char* to_string(RuleClass c) noexcept;

inline constexpr std::size_t kMaxPeriod = 8;
inline constexpr std::size_t kMaxPrefix = 64;
inline constexpr std::uint32_t kIidDenominator = 64;

struct RuleDescription {
  RuleClass rule_class = RuleClass::constant;
  /// constant: {k}; periodic: the pattern (its size is the period);
  /// iid: numerators over kIidDenominator, one per outcome.
  std::vector<std::int32_t> params;
  std::uint32_t description_length = 0;
  std::uint32_t data_bits = 0;
  /// log2 likelihood of the prefix the rule was induced from.
  double log2_likelihood = 0.0;

  std::uint32_t total_bits() const { return description_length + data_bits; }

  /// Outcome at position `index` of the continued sequence: deterministic for
  /// constant and periodic rules, sampled for iid.
  std::int32_t continuation(std::size_t index, Rng& rng) const;

  bool operator==(const RuleDescription&) const = default;
};

/// ceil(log2 n), with 0 for n <= 1.
std::uint32_t outcome_bits(std::size_t n_outcomes);

/// Throws invalid_argument for an empty prefix, a prefix longer than
/// kMaxPrefix, or an outcome outside [0, n_outcomes).
RuleDescription simplest_rule_induct(std::span<const std::int32_t> prefix, std::size_t n_outcomes);

std::string describe(const RuleDescription& rule);

}  // namespace precedence::rules
