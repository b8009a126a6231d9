#pragma once

// Scripted studies built on the precedence dynamics: a discretized two-slit
// screen, convergence of empirical statistics toward Born probabilities,
// lock-in incidence, and the exchangeability of precedent order.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "precedence/dynamics.hpp"
#include "precedence/ledger.hpp"
#include "precedence/qcore.hpp"
#include "precedence/rng.hpp"

namespace precedence::experiments {

// ---------------------------------------------------------------- statistics

/// Half the L1 distance. Both inputs must have equal length, nonnegative
/// entries and sums within 1e-9 of 1.
double tv_distance(std::span<const double> h1, std::span<const double> h2);

/// Counts divided by their total. Throws invalid_argument for an all-zero vector.
std::vector<double> normalize(std::span<const std::uint64_t> counts);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  /// Upper-tail probability; 1 when dof == 0.
  double p_value = 1.0;
};

/// Pearson goodness of fit of `observed` against `expected` probabilities.
/// Cells with zero expected probability are dropped; an observation in one
/// gives an infinite statistic and p = 0.
ChiSquare chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected);

/// Pearson test that two count vectors share one distribution (2 x k table,
/// empty columns dropped).
ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

// ---------------------------------------------------------------- double slit

/// Two-path screen: p_j proportional to
/// envelope_j * |w1 exp(i phase_1_j) + w2 exp(i phase_2_j)|^2.
struct SlitModel {
  std::vector<double> phase_1;
  std::vector<double> phase_2;
  std::vector<double> envelope;
  double weight_1 = 1.0;
  double weight_2 = 1.0;

  std::size_t n_bins() const noexcept { return envelope.size(); }

  /// Throws invalid_argument on mismatched lengths, negative envelope or an
  /// all-dark screen.
  void validate() const;

  /// Normalized analytic bin probabilities.
  std::vector<double> probabilities() const;

  /// Amplitude vector of the photon over screen bins (normalized).
  qcore::PureState two_path_state() const;
};

struct FarFieldParams {
  std::size_t n_bins = 64;
  double wavelength = 500e-9;
  double slit_separation = 50e-6;
  double slit_width = 10e-6;
  double screen_distance = 1.0;
  double screen_half_width = 0.05;
};

/// Bins at equally spaced screen positions; phase_k = 2 pi (r_k - L) / lambda
/// for the distance r_k from slit k, envelope = single-slit sinc^2.
SlitModel far_field_model(const FarFieldParams& params);

/// The same screen with the second path blocked.
SlitModel block_second_path(SlitModel model);

struct DoubleSlitResult {
  std::vector<std::int32_t> sequence;
  std::vector<std::uint64_t> histogram;
  std::vector<double> probabilities;
  dynamics::RegimeCounts regime_counts;
};

/// Each photon's bin comes from measure_with_precedence on the two-path state
/// with bin projectors.
DoubleSlitResult run_double_slit(const SlitModel& model, std::uint64_t n_photons, const dynamics::PolicyConfig& policy,
                                 Rng& rng, ledger::Ledger& ledger);

// ---------------------------------------------------------------- studies

struct PermutationReport {
  std::vector<double> p_values;
  /// Bonferroni: min(1, p * n_perms).
  std::vector<double> corrected_p_values;
  /// Exact next-outcome distribution of each permuted ledger (index 0 is the
  /// original order).
  std::vector<std::vector<double>> next_outcome_distributions;
  /// With a shared RNG stream every ordering yields identical draws.
  bool identical_under_common_seed = false;
  bool all_pass = false;
  double alpha = 1e-3;
};

/// Samples `n_draws` next outcomes from a ledger holding `sequence` in its
/// original order and in `n_perms` random orders, and compares each permuted
/// sample with the original by a chi-square homogeneity test.
PermutationReport permutation_study(std::span<const std::int32_t> sequence, std::size_t n_perms, Rng& rng,
                                    std::uint64_t n_draws = 10'000);

struct LockInReport {
  std::uint64_t n_runs = 0;
  std::uint64_t locked_runs = 0;
  double locked_fraction = 0.0;
};

/// Runs `n_runs` independent fresh-ledger streams of `run_length` steps;
/// a run is locked when every outcome after the first equals the first.
LockInReport lock_in_study(std::uint64_t n_runs, const dynamics::PolicyConfig& policy, std::uint64_t run_length,
                           const ledger::PreparationSpec& spec, const qcore::Povm& povm, Rng& rng);

struct ConvergenceReport {
  std::vector<std::uint64_t> steps;
  std::vector<double> tv_distance;
  /// Regime of the last step before each checkpoint (nullopt at step 0).
  std::vector<std::optional<dynamics::Regime>> regimes;
  /// First step index served by the build-up and precedence regimes.
  std::optional<std::uint64_t> first_buildup_step;
  std::optional<std::uint64_t> first_precedence_step;
  std::vector<double> born;
  std::vector<std::int32_t> outcomes;
};

/// TV distance between the stream's running empirical distribution (all
/// precedents, including any already in `ledger`) and the Born vector at
/// each checkpoint. Checkpoints must be strictly increasing and at most
/// n_steps; checkpoint 0 needs a nonempty stream.
ConvergenceReport convergence_study(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                                    const dynamics::PolicyConfig& policy, std::uint64_t n_steps,
                                    std::span<const std::uint64_t> checkpoints, Rng& rng, ledger::Ledger& ledger);

/// Records round(p_k * total) outcomes per k (largest remainder) in outcome order.
void prefill_exact(ledger::Ledger& ledger, const dynamics::MeasurementContext& ctx, std::uint64_t total);

/// Records `count` outcomes drawn i.i.d. from the Born vector.
void prefill_sampled(ledger::Ledger& ledger, const dynamics::MeasurementContext& ctx, std::uint64_t count, Rng& rng);

}  // namespace precedence::experiments
