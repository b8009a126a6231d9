#pragma once

// Preparation procedures and the canonical identities under which outcomes
// of "identically prepared" systems are pooled.

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "precedence/qcore.hpp"

namespace precedence::ledger {

/// SHA-256 digest.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  /// Parses 64 lowercase or uppercase hex characters. Throws parse on error.
  static Digest from_hex(std::string_view hex);
  static Digest of(std::string_view data);

  auto operator<=>(const Digest&) const = default;
};

struct PreparationKey {
  Digest digest;
  auto operator<=>(const PreparationKey&) const = default;
};

struct MeasurementKey {
  Digest digest;
  auto operator<=>(const MeasurementKey&) const = default;
};

struct PreparationSpec;

struct TransformStep {
  qcore::Matrix unitary;
};

struct ProjectStep {
  qcore::Matrix filter;
};

/// Appends another independently prepared system: rho -> rho (x) other.
struct ComposeStep {
  std::shared_ptr<const PreparationSpec> other;
};

using PreparationStep = std::variant<TransformStep, ProjectStep, ComposeStep>;

/// Start in basis state |initial> of a dim-dimensional system, then apply the
/// steps in order.
struct PreparationSpec {
  std::size_t dim = 0;
  std::size_t initial = 0;
  std::vector<PreparationStep> steps;
};

/// Runs the procedure through qcore. Throws on any invalid step.
qcore::DensityMatrix replay(const PreparationSpec& spec);

/// Dimension of the prepared system (dim times the dims of composed parts).
std::size_t output_dim(const PreparationSpec& spec);

/// Spec preparing |psi> from |0> with a single transitivity-witness unitary.
PreparationSpec spec_for_pure_state(const qcore::PureState& psi);

/// Canonical text forms. Numbers are printed with 12 significant digits;
/// negative zero prints as zero.
std::string canonical_serialization(const PreparationSpec& spec);
std::string canonical_serialization(const qcore::Povm& povm);
std::string canonical_serialization(const qcore::DensityMatrix& rho);

enum class KeyMode {
  /// Key on the preparation procedure itself.
  syntactic,
  /// Key on the prepared density matrix.
  semantic,
};

const char* to_string(KeyMode mode) noexcept;
KeyMode key_mode_from_string(std::string_view s);

/// Validates the spec by replaying it, then hashes its canonical form (or
/// the canonical form of the prepared state in semantic mode).
PreparationKey canonical_key(const PreparationSpec& spec, KeyMode mode = KeyMode::syntactic);
MeasurementKey measurement_key(const qcore::Povm& povm);

}  // namespace precedence::ledger
