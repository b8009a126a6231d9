#include "precedence/random_states.hpp"

#include <cmath>

namespace precedence::qcore {
namespace {

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re, im);
    }
  return g;
}

}  // namespace

PureState random_pure_state(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g = ginibre(n, 1, rng);
  return PureState::make(g.col(0));
}

DensityMatrix random_density_matrix(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const Matrix g = ginibre(n, n, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix::from_matrix(m);
}

UnitaryTransform random_unitary(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const Matrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return UnitaryTransform::from_matrix(q);
}

Povm random_povm(std::size_t dim, std::size_t n_outcomes, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> g;
  g.reserve(n_outcomes);
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < n_outcomes; ++k) {
    const Matrix a = ginibre(n, n, rng);
    g.push_back(a * a.adjoint());
    sum += g.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
  const Matrix inv_sqrt = es.operatorInverseSqrt();
  std::vector<Matrix> effects;
  effects.reserve(n_outcomes);
  for (const Matrix& gk : g) {
    Matrix e = inv_sqrt * gk * inv_sqrt;
    effects.push_back(0.5 * (e + e.adjoint()));
  }
  return Povm::make(std::move(effects));
}

}  // namespace precedence::qcore
