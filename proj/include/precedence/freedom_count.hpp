#pragma once

// Executable checks of the counting properties that single out quantum theory
// among the probabilistic theories considered here.
//
//  * Degrees of freedom K: the number of real parameters fixing every outcome
//    distribution. Computed as a rank, never assumed: K = N^2 - 1 for a
//    quantum system of capacity N, K = N - 1 for a classical one.
//  * Local tomography: joint states are fixed by product-effect statistics.
//  * Symmetry: every pure state can be reversibly mapped to every other.
//  * Correspondence: a state is recovered from the outcome statistics of an
//    informationally complete measurement set.
//
// Two further properties of the axiom system, equivalence of subspaces (a
// capacity-N system restricted to E_N = 0 behaves as a capacity-(N-1)
// system) and "all measurements allowed" (every probability functional on a
// two-level system is realized by a measurement), are not checked here: the
// latter quantifies over all measures and has no finite test.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "precedence/qcore.hpp"

namespace precedence::freedom {

enum class TheoryKind { quantum, classical };

const char* to_string(TheoryKind kind) noexcept;

struct GptModel {
  TheoryKind kind;
  std::size_t capacity;
  std::size_t dof;
};

/// K outcome probabilities fixing the state of a quantum system.
struct StatisticalState {
  std::vector<double> probs;
};

struct MeasurementSet {
  std::vector<qcore::Povm> povms;
  /// Rank of the span of all effects, including the normalization functional.
  std::size_t independent_functionals = 0;

  std::size_t dim() const { return povms.empty() ? 0 : povms.front().dim(); }
  std::size_t total_outcomes() const;
};

/// Singular-value rank with threshold 1e-8 * largest singular value.
std::size_t numerical_rank(const Eigen::MatrixXd& m);

/// Rank of the map from `states` to the outcome probabilities of `mset`.
std::size_t feature_rank(std::span<const qcore::DensityMatrix> states, const MeasurementSet& mset);

/// K for a system of capacity n >= 2, computed from the feature-map rank of
/// random states of the given kind through a spanning measurement set.
std::size_t degrees_of_freedom(TheoryKind kind, std::size_t n);

/// Computes K and checks it against N^2 - 1 (quantum) or N - 1 (classical).
/// Throws invalid_state if the computed value disagrees.
GptModel gpt_model(TheoryKind kind, std::size_t n);

/// n^2 - 1 two-outcome POVMs {E_k, I - E_k}, E_k = (I + G_k / |G_k|) / 2 for
/// the generalized Gell-Mann matrices G_k. Together with the identity the
/// effects span all n x n Hermitian matrices.
MeasurementSet informationally_complete_povm(std::size_t n);

/// Copy of `mset` without the POVM at `index`, with the functional rank
/// recomputed.
MeasurementSet without_generator(const MeasurementSet& mset, std::size_t index);

/// Rank of the real span of the effects of `mset`.
std::size_t effect_span_rank(const MeasurementSet& mset);

struct LocalTomographyResult {
  std::size_t rank = 0;
  bool holds = false;
};

/// Rank of the map from joint density matrices of an (n_a x n_b) system to
/// the statistics of product effects E_A (x) E_B.
LocalTomographyResult local_tomography_check(std::size_t n_a, std::size_t n_b);

/// Unitary U with U|omega> = |phi> up to phase. Built by completing each
/// vector to an orthonormal basis and mapping one basis onto the other.
qcore::UnitaryTransform transitivity_witness(const qcore::PureState& omega,
                                             const qcore::PureState& phi);

/// Outcome probabilities of every POVM in `mset`, in order.
std::vector<std::vector<double>> measurement_statistics(const qcore::DensityMatrix& rho,
                                                        const MeasurementSet& mset);

/// Least-squares linear inversion of `stats` followed by the Frobenius
/// projection onto unit-trace positive matrices. Throws
/// not_informationally_complete for a rank-deficient set.
qcore::DensityMatrix reconstruct_state(std::span<const std::vector<double>> stats,
                                       const MeasurementSet& mset);

/// First-outcome probabilities of the informationally complete set: exactly
/// K = n^2 - 1 numbers in [0, 1].
StatisticalState statistical_state(const qcore::DensityMatrix& rho);
qcore::DensityMatrix state_from_statistics(const StatisticalState& s, std::size_t n);

/// Structured report of every check in this module for capacities 2..max_n.
nlohmann::json postulate_report(std::size_t max_n);

}  // namespace precedence::freedom
