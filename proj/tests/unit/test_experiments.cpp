#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "precedence/error.hpp"
#include "precedence/experiments.hpp"

using namespace precedence;
using namespace precedence::experiments;
using dynamics::Buildup;
using dynamics::PolicyConfig;

namespace {

PolicyConfig policy(std::uint64_t t, Buildup b) {
  PolicyConfig p;
  p.threshold = t;
  p.buildup = b;
  return p;
}

ledger::PreparationSpec qubit(double a0, double a1) {
  qcore::Vector v(2);
  v << a0, a1;
  return ledger::spec_for_pure_state(qcore::PureState::make(v));
}

}  // namespace

TEST_CASE("total variation distance") {
  const std::vector<double> a{0.7, 0.3};
  const std::vector<double> b{0.5, 0.5};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(tv_distance(a, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(tv_distance(a, std::vector<double>{0.5, 0.6}), Error);
  CHECK_THROWS_AS(normalize(std::vector<std::uint64_t>{0, 0}), Error);
}

TEST_CASE("chi-square tests") {
  const std::vector<double> half{0.5, 0.5};
  auto c = chi_square_gof(std::vector<std::uint64_t>{50, 50}, half);
  CHECK(c.statistic == 0.0);
  CHECK(c.p_value == 1.0);
  c = chi_square_gof(std::vector<std::uint64_t>{60, 40}, half);
  CHECK(c.statistic == doctest::Approx(4.0));
  CHECK(c.dof == 1);
  CHECK(c.p_value == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-12));
  c = chi_square_gof(std::vector<std::uint64_t>{1, 1}, std::vector<double>{1.0, 0.0});
  CHECK(std::isinf(c.statistic));
  CHECK(c.p_value == 0.0);

  const auto h = chi_square_homogeneity(std::vector<std::uint64_t>{30, 70}, std::vector<std::uint64_t>{30, 70});
  CHECK(h.statistic == 0.0);
  CHECK(h.p_value == 1.0);
  // Table (10, 20 / 20, 10): every expected count is 15 and every |O - E| is 5.
  const auto d = chi_square_homogeneity(std::vector<std::uint64_t>{10, 20}, std::vector<std::uint64_t>{20, 10});
  CHECK(d.statistic == doctest::Approx(20.0 / 3.0));
  CHECK(d.dof == 1);
}

TEST_CASE("slit model") {
  const auto model = far_field_model({});
  CHECK(model.n_bins() == 64);
  const auto p = model.probabilities();
  double sum = 0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // The two-path amplitude vector reproduces the analytic vector through the Born rule.
  const auto born = qcore::born_probabilities(qcore::density_from_pure(model.two_path_state()),
                                              qcore::Povm::computational_basis(model.n_bins()));
  for (std::size_t j = 0; j < p.size(); ++j) CHECK(std::abs(born[j] - p[j]) <= 1e-12);

  const auto blocked = block_second_path(model);
  const auto pb = blocked.probabilities();
  double env_sum = 0;
  for (double e : model.envelope) env_sum += e;
  for (std::size_t j = 0; j < pb.size(); ++j) CHECK(std::abs(pb[j] - model.envelope[j] / env_sum) <= 1e-12);

  SlitModel broken = model;
  broken.envelope.pop_back();
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("single-path screen shows the envelope") {
  const auto model = block_second_path(far_field_model({}));
  Rng rng(14);
  ledger::Ledger l;
  const auto r = run_double_slit(model, 100'000, policy(50'000, Buildup::born_oracle), rng, l);
  CHECK(tv_distance(normalize(r.histogram), model.probabilities()) <= 0.03);
  std::uint64_t total = 0;
  for (auto c : r.histogram) total += c;
  CHECK(total == 100'000);
}

TEST_CASE("symmetric screen gives a symmetric histogram") {
  const auto model = far_field_model({});
  const auto p = model.probabilities();
  for (std::size_t j = 0; j < p.size(); ++j) CHECK(std::abs(p[j] - p[p.size() - 1 - j]) <= 1e-12);
  Rng rng(15);
  ledger::Ledger l;
  const std::uint64_t n = 100'000;
  const auto r = run_double_slit(model, n, policy(dynamics::kUnboundedThreshold, Buildup::born_oracle), rng, l);
  for (std::size_t j = 0; j < p.size() / 2; ++j) {
    const double diff = static_cast<double>(r.histogram[j]) - static_cast<double>(r.histogram[p.size() - 1 - j]);
    const double sigma = std::sqrt(2.0 * n * p[j] * (1 - p[j]));
    CHECK(std::abs(diff) <= 3.0 * sigma + 1.0);
  }
}

TEST_CASE("permutation study") {
  Rng rng(16);
  const std::vector<std::int32_t> constant(100, 1);
  auto r = permutation_study(constant, 5, rng);
  CHECK(r.all_pass);
  CHECK(r.identical_under_common_seed);
  for (const auto& d : r.next_outcome_distributions) CHECK(d == r.next_outcome_distributions[0]);

  const std::vector<std::int32_t> pair{0, 1};
  r = permutation_study(pair, 2, rng);
  for (const auto& d : r.next_outcome_distributions) CHECK(d == std::vector<double>{0.5, 0.5});

  std::vector<std::int32_t> seq(1000);
  for (auto& o : seq) o = static_cast<std::int32_t>(rng.uniform_index(2));
  r = permutation_study(seq, 20, rng);
  CHECK(r.p_values.size() == 20);
  for (double p : r.corrected_p_values) CHECK(p > 0.001);
  CHECK(r.all_pass);
  CHECK(r.identical_under_common_seed);

  CHECK_THROWS_AS(permutation_study(std::vector<std::int32_t>{1}, 3, rng), Error);
}

TEST_CASE("lock-in study") {
  Rng rng(17);
  const auto povm = qcore::Povm::computational_basis(2);
  auto r = lock_in_study(1000, policy(1, Buildup::urn), 1000, qubit(1, 1), povm, rng);
  CHECK(r.locked_runs == 1000);
  CHECK(r.locked_fraction == 1.0);

  r = lock_in_study(1000, policy(1000, Buildup::born_oracle), 10'000, qubit(1, 1), povm, rng);
  CHECK(r.locked_runs == 0);

  r = lock_in_study(200, policy(10, Buildup::simplest_rule), 1000, qubit(1, 1), povm, rng);
  CHECK(r.locked_fraction >= 0.0);
  CHECK(r.locked_fraction <= 1.0);
}

TEST_CASE("lock-in study is independent of thread scheduling") {
  const auto povm = qcore::Povm::computational_basis(2);
  Rng a(18);
  Rng b(18);
  const auto r1 = lock_in_study(300, policy(5, Buildup::urn), 200, qubit(1, 1), povm, a);
  const auto r2 = lock_in_study(300, policy(5, Buildup::urn), 200, qubit(1, 1), povm, b);
  CHECK(r1.locked_runs == r2.locked_runs);
}

TEST_CASE("convergence study") {
  const auto povm = qcore::Povm::computational_basis(2);
  const auto spec = qubit(std::sqrt(0.3), std::sqrt(0.7));
  const dynamics::MeasurementContext ctx(spec, povm);
  Rng rng(19);
  ledger::Ledger prefilled;
  prefill_exact(prefilled, ctx, 1000);
  CHECK(prefilled.counts(ctx.prep_key(), ctx.meas_key()) == std::vector<std::uint64_t>{300, 700});
  const std::vector<std::uint64_t> checkpoints{0, 100, 1000};
  auto r = convergence_study(spec, povm, policy(1000, Buildup::born_oracle), 1000, checkpoints, rng, prefilled);
  CHECK(r.tv_distance[0] <= 1e-12);
  CHECK(!r.regimes[0].has_value());
  CHECK(r.first_precedence_step == std::optional<std::uint64_t>{0});

  ledger::Ledger fresh;
  const std::vector<std::uint64_t> decades{1, 10, 100, 1000, 10'000};
  r = convergence_study(spec, povm, policy(dynamics::kUnboundedThreshold, Buildup::urn), 10'000, decades, rng, fresh);
  for (double tv : r.tv_distance) {
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
  }
  CHECK(r.first_buildup_step == std::optional<std::uint64_t>{1});
  CHECK(!r.first_precedence_step.has_value());

  ledger::Ledger empty;
  const std::vector<std::uint64_t> bad{0};
  CHECK_THROWS_AS(convergence_study(spec, povm, policy(10, Buildup::urn), 10, bad, rng, empty), Error);
  const std::vector<std::uint64_t> unordered{5, 3};
  CHECK_THROWS_AS(convergence_study(spec, povm, policy(10, Buildup::urn), 10, unordered, rng, empty), Error);
}
