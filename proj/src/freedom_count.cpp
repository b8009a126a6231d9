#include "precedence/freedom_count.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "precedence/error.hpp"
#include "precedence/random_states.hpp"

namespace precedence::freedom {
namespace {

using qcore::Complex;
using qcore::Matrix;

constexpr std::uint64_t kRankSeed = 0x5eed'0f'4a11ULL;

/// Generalized Gell-Mann matrices for dimension n, normalized Tr(G_j G_k) = 2 delta_jk:
/// symmetric and antisymmetric off-diagonal pairs, then the diagonal ones.
std::vector<Matrix> gell_mann(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n);
  std::vector<Matrix> out;
  out.reserve(n * n - 1);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k) {
      Matrix s = Matrix::Zero(d, d);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      out.push_back(std::move(s));
      Matrix a = Matrix::Zero(d, d);
      a(j, k) = Complex(0.0, -1.0);
      a(k, j) = Complex(0.0, 1.0);
      out.push_back(std::move(a));
    }
  for (Eigen::Index l = 1; l < d; ++l) {
    Matrix g = Matrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Eigen::Index i = 0; i < l; ++i) g(i, i) = scale;
    g(l, l) = -scale * static_cast<double>(l);
    out.push_back(std::move(g));
  }
  return out;
}

/// Orthonormal Hermitian basis {I/sqrt(n), G_k/sqrt(2)} under <A,B> = Tr(A B).
std::vector<Matrix> hermitian_basis(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n);
  std::vector<Matrix> out;
  out.reserve(n * n);
  out.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(n)));
  for (Matrix& g : gell_mann(n)) out.push_back(g / std::sqrt(2.0));
  return out;
}

/// Real coordinates of a Hermitian matrix: (Re, Im) of the upper triangle.
Eigen::VectorXd hermitian_coordinates(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v(n * n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      v(idx++) = m(i, j).real();
      if (j != i) v(idx++) = m(i, j).imag();
    }
  return v;
}

std::vector<const Matrix*> all_effects(const MeasurementSet& mset) {
  std::vector<const Matrix*> out;
  for (const auto& p : mset.povms)
    for (const auto& e : p.effects()) out.push_back(&e);
  return out;
}

/// Row-per-state, column-per-effect matrix of Tr(rho E).
Eigen::MatrixXd feature_matrix(std::span<const qcore::DensityMatrix> states,
                               std::span<const Matrix* const> effects) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(effects.size()));
  for (std::size_t r = 0; r < states.size(); ++r)
    for (std::size_t c = 0; c < effects.size(); ++c)
      f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (states[r].matrix() * (*effects[c])).trace().real();
  return f;
}

qcore::DensityMatrix random_classical_state(std::size_t n, Rng& rng) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (auto& x : w) x = -std::log(1.0 - rng.uniform01());
  w /= w.sum();
  return qcore::DensityMatrix::from_matrix(w.cast<Complex>().asDiagonal());
}

/// Projects a Hermitian matrix onto the unit-trace positive cone in the
/// Frobenius norm: diagonalize and project the spectrum onto the simplex.
qcore::DensityMatrix nearest_density_matrix(const Matrix& herm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (herm + herm.adjoint()));
  const Eigen::VectorXd lambda = es.eigenvalues();
  const Eigen::Index n = lambda.size();
  // Simplex projection (sort descending, find the water level).
  std::vector<double> sorted(lambda.data(), lambda.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  Eigen::VectorXd clipped = (lambda.array() - theta).cwiseMax(0.0);
  clipped /= clipped.sum();
  const Matrix v = es.eigenvectors();
  return qcore::DensityMatrix::from_matrix(v * clipped.cast<Complex>().asDiagonal() * v.adjoint());
}

}  // namespace

const char* to_string(TheoryKind kind) noexcept {
  return kind == TheoryKind::quantum ? "quantum" : "classical";
}

std::size_t MeasurementSet::total_outcomes() const {
  std::size_t total = 0;
  for (const auto& p : povms) total += p.n_outcomes();
  return total;
}

std::size_t numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold = 1e-8 * s(0);
  return static_cast<std::size_t>((s.array() > threshold).count());
}

std::size_t feature_rank(std::span<const qcore::DensityMatrix> states, const MeasurementSet& mset) {
  const auto effects = all_effects(mset);
  for (const auto& rho : states)
    if (rho.dim() != mset.dim()) throw Error(ErrorCode::dimension_mismatch, "feature_rank: state dimension");
  return numerical_rank(feature_matrix(states, effects));
}

std::size_t effect_span_rank(const MeasurementSet& mset) {
  const auto effects = all_effects(mset);
  if (effects.empty()) return 0;
  const Eigen::Index n = effects.front()->rows();
  Eigen::MatrixXd coords(n * n, static_cast<Eigen::Index>(effects.size()));
  for (std::size_t c = 0; c < effects.size(); ++c)
    coords.col(static_cast<Eigen::Index>(c)) = hermitian_coordinates(*effects[c]);
  return numerical_rank(coords);
}

MeasurementSet informationally_complete_povm(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "informationally_complete_povm: capacity must be >= 2");
  const auto d = static_cast<Eigen::Index>(n);
  const Matrix identity = Matrix::Identity(d, d);
  MeasurementSet mset;
  for (const Matrix& g : gell_mann(n)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    const double spread = es.eigenvalues().cwiseAbs().maxCoeff();
    Matrix e = 0.5 * (identity + g / spread);
    Matrix complement = identity - e;
    mset.povms.push_back(qcore::Povm::make({std::move(e), std::move(complement)}));
  }
  mset.independent_functionals = effect_span_rank(mset);
  return mset;
}

MeasurementSet without_generator(const MeasurementSet& mset, std::size_t index) {
  if (index >= mset.povms.size()) throw Error(ErrorCode::out_of_range, "without_generator: index");
  MeasurementSet out;
  for (std::size_t k = 0; k < mset.povms.size(); ++k)
    if (k != index) out.povms.push_back(mset.povms[k]);
  out.independent_functionals = effect_span_rank(out);
  return out;
}

std::size_t degrees_of_freedom(TheoryKind kind, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "degrees_of_freedom: capacity must be >= 2");
  Rng rng = Rng::for_stream(kRankSeed, n * 2 + (kind == TheoryKind::quantum ? 0 : 1));
  const MeasurementSet mset = informationally_complete_povm(n);
  const std::size_t n_states = n * n + n;
  std::vector<qcore::DensityMatrix> states;
  states.reserve(n_states);
  for (std::size_t k = 0; k < n_states; ++k)
    states.push_back(kind == TheoryKind::quantum ? qcore::random_density_matrix(n, rng)
                                                 : random_classical_state(n, rng));
  return feature_rank(states, mset) - 1;
}

GptModel gpt_model(TheoryKind kind, std::size_t n) {
  const std::size_t dof = degrees_of_freedom(kind, n);
  const std::size_t expected = kind == TheoryKind::quantum ? n * n - 1 : n - 1;
  if (dof != expected)
    throw Error(ErrorCode::invalid_state, std::string("gpt_model: computed K=") + std::to_string(dof) +
                                              " for " + to_string(kind) + " capacity " + std::to_string(n));
  return GptModel{kind, n, dof};
}

LocalTomographyResult local_tomography_check(std::size_t n_a, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) throw Error(ErrorCode::invalid_argument, "local_tomography_check: zero capacity");
  auto local_effects = [](std::size_t n) {
    std::vector<Matrix> out;
    if (n == 1) {
      out.push_back(Matrix::Identity(1, 1));
      return out;
    }
    for (const auto& p : informationally_complete_povm(n).povms)
      for (const auto& e : p.effects()) out.push_back(e);
    return out;
  };
  const auto effects_a = local_effects(n_a);
  const auto effects_b = local_effects(n_b);
  std::vector<Matrix> products;
  products.reserve(effects_a.size() * effects_b.size());
  for (const auto& ea : effects_a)
    for (const auto& eb : effects_b) products.push_back(qcore::kron(ea, eb));
  std::vector<const Matrix*> product_ptrs;
  for (const auto& e : products) product_ptrs.push_back(&e);

  const std::size_t joint = n_a * n_b;
  Rng rng = Rng::for_stream(kRankSeed, 0x10ca1 + joint);
  std::vector<qcore::DensityMatrix> states;
  for (std::size_t k = 0; k < joint * joint + joint; ++k) states.push_back(qcore::random_density_matrix(joint, rng));

  LocalTomographyResult result;
  result.rank = numerical_rank(feature_matrix(states, product_ptrs));
  result.holds = result.rank == joint * joint;
  return result;
}

qcore::UnitaryTransform transitivity_witness(const qcore::PureState& omega, const qcore::PureState& phi) {
  if (omega.dim() != phi.dim()) throw Error(ErrorCode::dimension_mismatch, "transitivity_witness: dimensions differ");
  const auto n = static_cast<Eigen::Index>(omega.dim());
  // The first column of the Householder Q of a single vector is that vector
  // times a phase; the remaining columns complete it to an orthonormal basis.
  auto completed_basis = [n](const qcore::Vector& v) {
    Eigen::HouseholderQR<Matrix> qr{Matrix(v)};
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Complex r00 = qr.matrixQR()(0, 0);
    q.col(0) *= r00 / std::abs(r00);
    return q;
  };
  const Matrix from = completed_basis(omega.amplitudes());
  const Matrix to = completed_basis(phi.amplitudes());
  return qcore::UnitaryTransform::from_matrix(to * from.adjoint());
}

std::vector<std::vector<double>> measurement_statistics(const qcore::DensityMatrix& rho,
                                                        const MeasurementSet& mset) {
  std::vector<std::vector<double>> out;
  out.reserve(mset.povms.size());
  for (const auto& p : mset.povms) out.push_back(qcore::born_probabilities(rho, p));
  return out;
}

qcore::DensityMatrix reconstruct_state(std::span<const std::vector<double>> stats, const MeasurementSet& mset) {
  if (stats.size() != mset.povms.size())
    throw Error(ErrorCode::dimension_mismatch, "reconstruct_state: one probability vector per POVM required");
  const std::size_t n = mset.dim();
  if (n == 0) throw Error(ErrorCode::not_informationally_complete, "reconstruct_state: empty measurement set");
  const auto basis = hermitian_basis(n);
  const auto rows = static_cast<Eigen::Index>(mset.total_outcomes());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd observed(rows);
  Eigen::Index r = 0;
  for (std::size_t k = 0; k < mset.povms.size(); ++k) {
    const auto& effects = mset.povms[k].effects();
    if (stats[k].size() != effects.size())
      throw Error(ErrorCode::dimension_mismatch, "reconstruct_state: probability vector length for POVM " +
                                                     std::to_string(k));
    for (std::size_t o = 0; o < effects.size(); ++o, ++r) {
      for (Eigen::Index c = 0; c < cols; ++c)
        design(r, c) = (basis[static_cast<std::size_t>(c)] * effects[o]).trace().real();
      observed(r) = stats[k][o];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(1e-8);
  if (static_cast<std::size_t>(cod.rank()) < basis.size())
    throw Error(ErrorCode::not_informationally_complete,
                "reconstruct_state: measurement set spans " + std::to_string(cod.rank()) + " of " +
                    std::to_string(basis.size()) + " dimensions");
  const Eigen::VectorXd coeffs = cod.solve(observed);
  const auto d = static_cast<Eigen::Index>(n);
  Matrix estimate = Matrix::Zero(d, d);
  for (Eigen::Index c = 0; c < cols; ++c) estimate += coeffs(c) * basis[static_cast<std::size_t>(c)];
  return nearest_density_matrix(estimate);
}

StatisticalState statistical_state(const qcore::DensityMatrix& rho) {
  const MeasurementSet mset = informationally_complete_povm(rho.dim());
  StatisticalState s;
  s.probs.reserve(mset.povms.size());
  for (const auto& p : mset.povms) s.probs.push_back(qcore::born_probabilities(rho, p)[0]);
  return s;
}

qcore::DensityMatrix state_from_statistics(const StatisticalState& s, std::size_t n) {
  if (s.probs.size() != n * n - 1)
    throw Error(ErrorCode::dimension_mismatch, "state_from_statistics: expected K = n^2 - 1 probabilities");
  const MeasurementSet mset = informationally_complete_povm(n);
  std::vector<std::vector<double>> stats;
  stats.reserve(s.probs.size());
  for (double p : s.probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "state_from_statistics: probability outside [0,1]");
    stats.push_back({p, 1.0 - p});
  }
  return reconstruct_state(stats, mset);
}

nlohmann::json postulate_report(std::size_t max_n) {
  using nlohmann::json;
  if (max_n < 2) throw Error(ErrorCode::invalid_argument, "postulate_report: max_n must be >= 2");
  json report;
  bool all_pass = true;

  json dof = json::array();
  bool gaps_positive = true;
  for (std::size_t n = 2; n <= max_n; ++n) {
    const std::size_t kq = degrees_of_freedom(TheoryKind::quantum, n);
    const std::size_t kc = degrees_of_freedom(TheoryKind::classical, n);
    const bool pass = kq == n * n - 1 && kc == n - 1;
    const auto gap = static_cast<long long>(kq) - static_cast<long long>(kc);
    gaps_positive = gaps_positive && gap > 0;
    all_pass = all_pass && pass;
    dof.push_back({{"capacity", n},
                   {"quantum", kq},
                   {"classical", kc},
                   {"expected_quantum", n * n - 1},
                   {"expected_classical", n - 1},
                   {"gap", gap},
                   {"pass", pass}});
  }
  report["degrees_of_freedom"] = dof;
  report["maximal_freedom"] = {{"quantum_exceeds_classical", gaps_positive}, {"pass", gaps_positive}};
  all_pass = all_pass && gaps_positive;

  json local = json::array();
  for (auto [na, nb] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}}) {
    const auto r = local_tomography_check(na, nb);
    all_pass = all_pass && r.holds;
    local.push_back({{"n_a", na}, {"n_b", nb}, {"rank", r.rank}, {"expected", na * nb * na * nb}, {"holds", r.holds}});
  }
  report["local_tomography"] = local;

  Rng rng = Rng::for_stream(kRankSeed, 0x7a5);
  double min_overlap = 1.0;
  for (std::size_t n : {2u, 3u, 4u})
    for (int k = 0; k < 100; ++k) {
      const auto omega = qcore::random_pure_state(n, rng);
      const auto phi = qcore::random_pure_state(n, rng);
      const auto u = transitivity_witness(omega, phi);
      const double ov = std::abs(phi.amplitudes().dot(u.matrix() * omega.amplitudes()));
      min_overlap = std::min(min_overlap, ov);
    }
  const bool transitive = min_overlap >= 1.0 - 1e-10;
  all_pass = all_pass && transitive;
  report["transitivity"] = {{"pairs_per_dim", 100}, {"dims", {2, 3, 4}}, {"min_overlap", min_overlap}, {"pass", transitive}};

  double max_error = 0.0;
  for (std::size_t n : {2u, 3u}) {
    const MeasurementSet mset = informationally_complete_povm(n);
    for (int k = 0; k < 50; ++k) {
      const auto rho = qcore::random_density_matrix(n, rng);
      const auto stats = measurement_statistics(rho, mset);
      const auto back = reconstruct_state(stats, mset);
      max_error = std::max(max_error, (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff());
    }
  }
  const bool round_trip = max_error <= 1e-8;
  all_pass = all_pass && round_trip;
  report["tomography_round_trip"] = {{"states_per_dim", 50}, {"dims", {2, 3}}, {"max_abs_error", max_error}, {"pass", round_trip}};

  report["not_verified"] = {"equivalence of subspaces", "all measurements allowed"};
  report["notes"] = {
      "K is counted in independent outcome functionals: an informationally complete set exposes K+1 of them "
      "including normalization, while a single N-outcome measurement contributes at most N-1."};
  report["pass"] = all_pass;
  return report;
}

}  // namespace precedence::freedom
