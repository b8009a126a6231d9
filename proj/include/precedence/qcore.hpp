#pragma once

// Finite-dimensional quantum state model: pure states, density matrices,
// POVMs, unitaries, and the preparation operations that act on them
// (composition, projection, transformation, mixing, reduction).
//
// All types are immutable once constructed. Factory functions validate the
// structural invariants and throw precedence::Error on violation.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace precedence::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerance for Hermiticity, positivity, trace and unitarity checks.
inline constexpr double kStructuralTol = 1e-10;
/// Tolerance for normalization of probability vectors.
inline constexpr double kProbabilityTol = 1e-9;
/// Smallest postselection weight accepted by project().
inline constexpr double kPostselectionTol = 1e-12;

class PureState {
 public:
  /// Normalized copy of `amplitudes`. Throws invalid_state on an empty, zero
  /// or non-finite vector.
  static PureState make(const Vector& amplitudes);
  static PureState basis(std::size_t dim, std::size_t index);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  explicit PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {}
  Vector amplitudes_;
};

/// |<a|b>|, the phase-insensitive overlap. Throws dimension_mismatch.
double overlap(const PureState& a, const PureState& b);

class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity and unit trace at kStructuralTol.
  /// The stored matrix is the Hermitian part of `m`.
  static DensityMatrix from_matrix(const Matrix& m);
  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix basis(std::size_t dim, std::size_t index);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  /// Tr(rho^2).
  double purity() const;
  /// Eigenvalues in ascending order.
  Eigen::VectorXd eigenvalues() const;

 private:
  explicit DensityMatrix(Matrix m) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

class Povm {
 public:
  /// Each effect must be Hermitian with spectrum in [0, 1] (to
  /// kStructuralTol) and the effects must sum to the identity.
  static Povm make(std::vector<Matrix> effects);
  /// Rank-1 projectors onto the computational basis.
  static Povm computational_basis(std::size_t dim);

  const std::vector<Matrix>& effects() const noexcept { return effects_; }
  std::size_t n_outcomes() const noexcept { return effects_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(effects_.front().rows()); }

 private:
  explicit Povm(std::vector<Matrix> effects) : effects_(std::move(effects)) {}
  std::vector<Matrix> effects_;
};

class UnitaryTransform {
 public:
  /// Validates U^dagger U = I within kStructuralTol.
  static UnitaryTransform from_matrix(const Matrix& u);
  static UnitaryTransform identity(std::size_t dim);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  explicit UnitaryTransform(Matrix m) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

DensityMatrix density_from_pure(const PureState& psi);

/// p_i = Tr(rho E_i), clamped to [0, 1].
std::vector<double> born_probabilities(const DensityMatrix& rho, const Povm& m);

/// Tensor product a (x) b.
DensityMatrix compose(const DensityMatrix& a, const DensityMatrix& b);

/// F rho F^dagger / Tr(F rho F^dagger). Throws impossible_postselection when
/// the filter leaves less than kPostselectionTol of the state.
DensityMatrix project(const DensityMatrix& rho, const Matrix& filter);

/// U rho U^dagger.
DensityMatrix transform(const DensityMatrix& rho, const UnitaryTransform& u);

/// x a + (1 - x) b for x in [0, 1].
DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double x);

enum class Subsystem { a, b };

/// Reduced state of one factor of a bipartite system with dim = dim_a * dim_b.
/// Basis ordering is |i_a> (x) |j_b> -> index i_a * dim_b + j_b.
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep);

/// Kronecker product of two complex matrices.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace precedence::qcore
