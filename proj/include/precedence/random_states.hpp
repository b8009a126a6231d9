#pragma once

#include <cstddef>

#include "precedence/qcore.hpp"
#include "precedence/rng.hpp"

namespace precedence::qcore {

/// Haar-random pure state (normalized complex Gaussian vector).
PureState random_pure_state(std::size_t dim, Rng& rng);

/// Full-rank mixed state from the Ginibre ensemble: G G^dagger / Tr(G G^dagger).
DensityMatrix random_density_matrix(std::size_t dim, Rng& rng);

/// Haar-random unitary (QR of a Ginibre matrix with the phase correction).
UnitaryTransform random_unitary(std::size_t dim, Rng& rng);

/// Random full-rank POVM with `n_outcomes` effects:
/// E_k = S^{-1/2} G_k S^{-1/2} for random positive G_k and S = sum G_k.
Povm random_povm(std::size_t dim, std::size_t n_outcomes, Rng& rng);

}  // namespace precedence::qcore
