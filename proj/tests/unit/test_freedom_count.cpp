#include <cmath>

#include "doctest.h"
#include "precedence/error.hpp"
#include "precedence/freedom_count.hpp"
#include "precedence/random_states.hpp"

using namespace precedence;
using namespace precedence::freedom;
using qcore::DensityMatrix;
using qcore::Matrix;

TEST_CASE("degrees of freedom are computed ranks") {
  CHECK(degrees_of_freedom(TheoryKind::quantum, 2) == 3);
  CHECK(degrees_of_freedom(TheoryKind::quantum, 3) == 8);
  CHECK(degrees_of_freedom(TheoryKind::classical, 4) == 3);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto q = gpt_model(TheoryKind::quantum, n);
    const auto c = gpt_model(TheoryKind::classical, n);
    CHECK(q.dof == n * n - 1);
    CHECK(c.dof == n - 1);
    CHECK(q.dof - c.dof == n * n - n);
  }
  CHECK_THROWS_AS(degrees_of_freedom(TheoryKind::quantum, 1), Error);
}

TEST_CASE("informationally complete set spans the Hermitian matrices") {
  CHECK(informationally_complete_povm(2).independent_functionals == 4);
  CHECK(informationally_complete_povm(3).independent_functionals == 9);
  const auto ic2 = informationally_complete_povm(2);
  for (std::size_t i = 0; i < ic2.povms.size(); ++i) CHECK(without_generator(ic2, i).independent_functionals == 3);
  CHECK(effect_span_rank(informationally_complete_povm(4)) == 16);
}

TEST_CASE("local tomography ranks") {
  auto r = local_tomography_check(2, 2);
  CHECK(r.rank == 16);
  CHECK(r.holds);
  r = local_tomography_check(2, 3);
  CHECK(r.rank == 36);
  CHECK(r.holds);
  for (std::size_t n = 1; n <= 3; ++n) {
    r = local_tomography_check(1, n);
    CHECK(r.rank == n * n);
    CHECK(r.holds);
  }
}

TEST_CASE("transitivity witnesses") {
  using qcore::PureState;
  const auto zero = PureState::basis(2, 0);
  const auto one = PureState::basis(2, 1);
  const auto same = transitivity_witness(zero, zero);
  CHECK(std::abs(same.matrix()(0, 0)) == doctest::Approx(1.0));
  const auto swap = transitivity_witness(zero, one);
  CHECK(std::abs(swap.matrix()(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(swap.matrix()(0, 0)) <= 1e-12);

  Rng rng(4);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int k = 0; k < 100; ++k) {
      const auto w = qcore::random_pure_state(n, rng);
      const auto p = qcore::random_pure_state(n, rng);
      const auto c = qcore::random_pure_state(n, rng);
      const auto u = transitivity_witness(w, p);
      CHECK(std::abs(p.amplitudes().dot(u.matrix() * w.amplitudes())) >= 1 - 1e-10);
      const auto v = transitivity_witness(p, c);
      CHECK(std::abs(c.amplitudes().dot(v.matrix() * u.matrix() * w.amplitudes())) >= 1 - 1e-9);
    }
  CHECK_THROWS_AS(transitivity_witness(PureState::basis(2, 0), PureState::basis(3, 0)), Error);
}

TEST_CASE("reconstruction round trip") {
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto mset = informationally_complete_povm(n);
    const auto zero = DensityMatrix::basis(n, 0);
    CHECK((reconstruct_state(measurement_statistics(zero, mset), mset).matrix() - zero.matrix()).cwiseAbs().maxCoeff() <=
          1e-8);
    const auto mixed = DensityMatrix::maximally_mixed(n);
    CHECK((reconstruct_state(measurement_statistics(mixed, mset), mset).matrix() - mixed.matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
  }
  Rng rng(9);
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto mset = informationally_complete_povm(n);
    for (int k = 0; k < 50; ++k) {
      const auto rho = qcore::random_density_matrix(n, rng);
      const auto back = reconstruct_state(measurement_statistics(rho, mset), mset);
      CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
      const auto via_k = state_from_statistics(statistical_state(rho), n);
      CHECK(statistical_state(rho).probs.size() == n * n - 1);
      CHECK((via_k.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("noisy statistics still reconstruct a valid state") {
  Rng rng(10);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto mset = informationally_complete_povm(n);
    for (int k = 0; k < 20; ++k) {
      // Nearly pure states put the noisy estimate outside the state space.
      const auto rho = qcore::density_from_pure(qcore::random_pure_state(n, rng));
      auto stats = measurement_statistics(rho, mset);
      for (auto& row : stats)
        for (double& v : row) v += 1e-3 * (2 * rng.uniform01() - 1);
      const auto back = reconstruct_state(stats, mset);
      const Matrix& m = back.matrix();
      CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(back.eigenvalues().minCoeff() >= -1e-10);
      CHECK(std::abs(m.trace().real() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("incomplete measurement sets are rejected") {
  const auto mset = informationally_complete_povm(2);
  const auto reduced = without_generator(mset, 0);
  const auto stats = measurement_statistics(DensityMatrix::basis(2, 0), reduced);
  try {
    reconstruct_state(stats, reduced);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_informationally_complete);
  }
}

TEST_CASE("postulate report") {
  const auto r = postulate_report(4);
  CHECK(r["pass"].get<bool>());
  REQUIRE(r["degrees_of_freedom"].size() == 3);
  CHECK(r["degrees_of_freedom"][2]["quantum"].get<int>() == 15);
  CHECK(r.contains("not_verified"));
}
