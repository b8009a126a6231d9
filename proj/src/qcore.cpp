#include "precedence/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "precedence/error.hpp"

namespace precedence::qcore {
namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    fail(ErrorCode::invalid_argument, os.str());
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension " << a << " does not match " << b;
    fail(ErrorCode::dimension_mismatch, os.str());
  }
}

}  // namespace

PureState PureState::make(const Vector& amplitudes) {
  if (amplitudes.size() == 0) fail(ErrorCode::invalid_state, "pure state: empty amplitude vector");
  if (!all_finite(amplitudes)) fail(ErrorCode::invalid_state, "pure state: non-finite amplitude");
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) fail(ErrorCode::invalid_state, "pure state: zero vector");
  return PureState(amplitudes / norm);
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) fail(ErrorCode::out_of_range, "pure state: basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

double overlap(const PureState& a, const PureState& b) {
  require_same_dim(a.dim(), b.dim(), "overlap");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

DensityMatrix DensityMatrix::from_matrix(const Matrix& m) {
  require_square(m, "density matrix");
  if (!all_finite(m)) fail(ErrorCode::invalid_state, "density matrix: non-finite entry");
  if (hermiticity_defect(m) > kStructuralTol)
    fail(ErrorCode::invalid_state, "density matrix: not Hermitian");
  Matrix herm = 0.5 * (m + m.adjoint());
  const double tr = herm.trace().real();
  if (std::abs(tr - 1.0) > kStructuralTol) {
    std::ostringstream os;
    os << "density matrix: trace " << tr << " differs from 1";
    fail(ErrorCode::invalid_state, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStructuralTol)
    fail(ErrorCode::invalid_state, "density matrix: negative eigenvalue");
  return DensityMatrix(std::move(herm));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "density matrix: zero dimension");
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis(std::size_t dim, std::size_t index) {
  return density_from_pure(PureState::basis(dim, index));
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Povm Povm::make(std::vector<Matrix> effects) {
  if (effects.empty()) fail(ErrorCode::invalid_argument, "povm: no effects");
  const Eigen::Index n = effects.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < effects.size(); ++k) {
    Matrix& e = effects[k];
    require_square(e, "povm effect");
    if (e.rows() != n) fail(ErrorCode::dimension_mismatch, "povm: effects have different dimensions");
    if (!all_finite(e)) fail(ErrorCode::invalid_argument, "povm: non-finite effect entry");
    if (hermiticity_defect(e) > kStructuralTol)
      fail(ErrorCode::invalid_argument, "povm: effect " + std::to_string(k) + " is not Hermitian");
    e = 0.5 * (e + e.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kStructuralTol || es.eigenvalues().maxCoeff() > 1.0 + kStructuralTol)
      fail(ErrorCode::invalid_argument, "povm: effect " + std::to_string(k) + " has spectrum outside [0,1]");
    sum += e;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kStructuralTol)
    fail(ErrorCode::invalid_argument, "povm: effects do not sum to the identity");
  return Povm(std::move(effects));
}

Povm Povm::computational_basis(std::size_t dim) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "povm: zero dimension");
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> effects;
  effects.reserve(dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix e = Matrix::Zero(n, n);
    e(k, k) = 1.0;
    effects.push_back(std::move(e));
  }
  return Povm(std::move(effects));
}

UnitaryTransform UnitaryTransform::from_matrix(const Matrix& u) {
  require_square(u, "unitary");
  if (!all_finite(u)) fail(ErrorCode::invalid_argument, "unitary: non-finite entry");
  const Eigen::Index n = u.rows();
  if ((u.adjoint() * u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kStructuralTol)
    fail(ErrorCode::invalid_argument, "unitary: U^dagger U differs from identity");
  return UnitaryTransform(u);
}

UnitaryTransform UnitaryTransform::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryTransform(Matrix::Identity(n, n));
}

DensityMatrix density_from_pure(const PureState& psi) {
  const Vector& a = psi.amplitudes();
  return DensityMatrix::from_matrix(a * a.adjoint());
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const Povm& m) {
  require_same_dim(rho.dim(), m.dim(), "born_probabilities");
  std::vector<double> p;
  p.reserve(m.n_outcomes());
  for (const Matrix& e : m.effects()) {
    const double v = (rho.matrix() * e).trace().real();
    p.push_back(std::clamp(v, 0.0, 1.0));
  }
  return p;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix compose(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_matrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix project(const DensityMatrix& rho, const Matrix& filter) {
  require_square(filter, "project");
  require_same_dim(rho.dim(), static_cast<std::size_t>(filter.rows()), "project");
  const Matrix unnormalized = filter * rho.matrix() * filter.adjoint();
  const double weight = unnormalized.trace().real();
  if (!(weight > kPostselectionTol))
    fail(ErrorCode::impossible_postselection, "project: filter annihilates the state");
  return DensityMatrix::from_matrix(unnormalized / weight);
}

DensityMatrix transform(const DensityMatrix& rho, const UnitaryTransform& u) {
  require_same_dim(rho.dim(), u.dim(), "transform");
  return DensityMatrix::from_matrix(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double x) {
  require_same_dim(a.dim(), b.dim(), "mix");
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::invalid_argument, "mix: weight outside [0,1]");
  if (x == 1.0) return a;
  if (x == 0.0) return b;
  return DensityMatrix::from_matrix(x * a.matrix() + (1.0 - x) * b.matrix());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep) {
  if (dim_a == 0 || dim_b == 0 || dim_a * dim_b != rho.dim()) {
    std::ostringstream os;
    os << "partial_trace: " << dim_a << " x " << dim_b << " does not factor dimension " << rho.dim();
    fail(ErrorCode::dimension_mismatch, os.str());
  }
  const auto na = static_cast<Eigen::Index>(dim_a);
  const auto nb = static_cast<Eigen::Index>(dim_b);
  const Matrix& m = rho.matrix();
  if (keep == Subsystem::a) {
    Matrix out = Matrix::Zero(na, na);
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < na; ++j)
        for (Eigen::Index k = 0; k < nb; ++k) out(i, j) += m(i * nb + k, j * nb + k);
    return DensityMatrix::from_matrix(out);
  }
  Matrix out = Matrix::Zero(nb, nb);
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      for (Eigen::Index k = 0; k < na; ++k) out(i, j) += m(k * nb + i, k * nb + j);
  return DensityMatrix::from_matrix(out);
}

}  // namespace precedence::qcore
