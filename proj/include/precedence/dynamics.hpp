#pragma once

// Precedence measurement dynamics.
//
// For a measurement on a prepared system with n recorded precedents:
//   n == 0      outcome comes from the freedom source;
//   n >= T      outcome is a uniform draw from the precedent multiset;
//   otherwise   outcome comes from the build-up policy.
// Every outcome, whatever its regime, is recorded and becomes a precedent.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precedence/ledger.hpp"
#include "precedence/qcore.hpp"
#include "precedence/rng.hpp"

namespace precedence::dynamics {

enum class Buildup { urn, born_oracle, simplest_rule };
enum class FreedomKind { uniform, seeded_external, masked };
enum class Regime { freedom = 0, buildup = 1, precedence = 2 };

const char* to_string(Buildup b) noexcept;
const char* to_string(FreedomKind f) noexcept;
const char* to_string(Regime r) noexcept;
Buildup buildup_from_string(std::string_view s);
FreedomKind freedom_from_string(std::string_view s);

/// Threshold meaning "never switch to precedence sampling".
inline constexpr std::uint64_t kUnboundedThreshold = std::numeric_limits<std::uint64_t>::max();

struct FreedomConfig {
  FreedomKind kind = FreedomKind::uniform;
  /// Allowed outcomes for `masked`.
  std::vector<std::int32_t> mask;
  /// Outcomes handed out in order for `seeded_external`.
  std::vector<std::int32_t> external;
};

struct PolicyConfig {
  std::uint64_t threshold = 1000;
  Buildup buildup = Buildup::born_oracle;
  FreedomConfig freedom;
  ledger::KeyMode key_mode = ledger::KeyMode::syntactic;

  /// Throws config when T < 1 or a masked source has an empty mask.
  void validate() const;
};

/// Source of outcomes for measurements without precedent. Stateful only for
/// `seeded_external`, which hands out its sequence in order.
class FreedomSource {
 public:
  explicit FreedomSource(FreedomConfig config);

  /// Throws invalid_argument for an empty allowed set or an allowed outcome
  /// outside [0, n_outcomes), and out_of_range when an external sequence is
  /// exhausted.
  std::int32_t draw(std::size_t n_outcomes, Rng& rng);

  std::size_t consumed() const noexcept { return cursor_; }

 private:
  FreedomConfig config_;
  std::size_t cursor_ = 0;
};

/// One outcome from the build-up policy given the stream's prefix
/// (1 <= prefix.size() < T). Simplest-rule induction uses at most the first
/// 64 precedents.
std::int32_t buildup_step(const PolicyConfig& policy, std::span<const std::int32_t> prefix,
                          std::optional<std::span<const double>> born, std::size_t n_outcomes, Rng& rng);

/// Uniform draw from a multiset given by per-outcome counts. Depends only on
/// the counts, never on the order outcomes were recorded in.
std::int32_t sample_precedent(std::span<const std::uint64_t> counts, Rng& rng);

struct MeasureResult {
  std::int32_t outcome = 0;
  Regime regime = Regime::freedom;
  std::uint64_t seq_no = 0;
};

/// Keys and Born vector of a fixed (preparation, measurement) pair, computed
/// once so repeated measurements skip replay and hashing.
class MeasurementContext {
 public:
  MeasurementContext(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                     ledger::KeyMode mode = ledger::KeyMode::syntactic);

  const ledger::PreparationKey& prep_key() const noexcept { return prep_; }
  const ledger::MeasurementKey& meas_key() const noexcept { return meas_; }
  std::size_t n_outcomes() const noexcept { return born_.size(); }
  const std::vector<double>& born() const noexcept { return born_; }

 private:
  ledger::PreparationKey prep_;
  ledger::MeasurementKey meas_;
  std::vector<double> born_;
};

MeasureResult measure(const MeasurementContext& ctx, ledger::Ledger& ledger, const PolicyConfig& policy,
                      FreedomSource& freedom, Rng& rng);

/// Single measurement, keys derived from `spec` and `povm` under the
/// policy's key mode. Throws dimension_mismatch for incompatible inputs.
MeasureResult measure_with_precedence(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                                      ledger::Ledger& ledger, const PolicyConfig& policy, FreedomSource& freedom,
                                      Rng& rng);

struct RegimeCounts {
  std::uint64_t freedom = 0;
  std::uint64_t buildup = 0;
  std::uint64_t precedence = 0;

  bool operator==(const RegimeCounts&) const = default;
};

struct StreamResult {
  std::vector<std::int32_t> outcomes;
  std::vector<Regime> regimes;
  RegimeCounts regime_counts;
  /// Counts of this run's outcomes (precedents loaded beforehand excluded).
  std::vector<std::uint64_t> histogram;
  std::vector<double> born;
  /// How build-up outcomes relate to an induced rule; empty unless simplest_rule.
  std::string continuation_note;
};

/// n_steps measurements against `ledger`.
StreamResult run_stream(const ledger::PreparationSpec& spec, const qcore::Povm& povm, const PolicyConfig& policy,
                        std::uint64_t n_steps, Rng& rng, ledger::Ledger& ledger);

/// Same, with a fresh ledger that is discarded afterwards.
StreamResult run_stream(const ledger::PreparationSpec& spec, const qcore::Povm& povm, const PolicyConfig& policy,
                        std::uint64_t n_steps, Rng& rng);

}  // namespace precedence::dynamics
