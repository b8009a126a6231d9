#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "precedence/dynamics.hpp"
#include "precedence/error.hpp"
#include "precedence/experiments.hpp"

using namespace precedence;
using namespace precedence::dynamics;
using ledger::PreparationSpec;
using qcore::Povm;

namespace {

PreparationSpec plus_spec() {
  qcore::Vector v(2);
  v << 1.0, 1.0;
  return ledger::spec_for_pure_state(qcore::PureState::make(v));
}

PolicyConfig policy(std::uint64_t t, Buildup b) {
  PolicyConfig p;
  p.threshold = t;
  p.buildup = b;
  return p;
}

double tv_from(const std::vector<std::uint64_t>& counts, const std::vector<double>& p) {
  return experiments::tv_distance(experiments::normalize(counts), p);
}

}  // namespace

TEST_CASE("policy validation") {
  CHECK_THROWS_AS(policy(0, Buildup::urn).validate(), Error);
  PolicyConfig masked;
  masked.freedom.kind = FreedomKind::masked;
  CHECK_THROWS_AS(masked.validate(), Error);
  CHECK(buildup_from_string("urn") == Buildup::urn);
  CHECK_THROWS_AS(buildup_from_string("polya"), Error);
}

TEST_CASE("freedom sources") {
  Rng rng(1);
  FreedomSource uniform({});
  std::vector<std::uint64_t> counts(4, 0);
  for (int i = 0; i < 100'000; ++i) ++counts[static_cast<std::size_t>(uniform.draw(4, rng))];
  for (auto c : counts) CHECK(std::abs(c / 1e5 - 0.25) <= 0.005);

  FreedomSource masked({FreedomKind::masked, {1, 3}, {}});
  for (int i = 0; i < 10'000; ++i) {
    const auto o = masked.draw(4, rng);
    CHECK((o == 1 || o == 3));
  }
  FreedomSource bad_mask({FreedomKind::masked, {7}, {}});
  CHECK_THROWS_AS(bad_mask.draw(4, rng), Error);

  FreedomSource external({FreedomKind::seeded_external, {}, {2, 0, 1}});
  CHECK(external.draw(3, rng) == 2);
  CHECK(external.draw(3, rng) == 0);
  CHECK(external.draw(3, rng) == 1);
  CHECK(external.consumed() == 3);
  try {
    external.draw(3, rng);
    FAIL("expected exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_range);
  }
}

TEST_CASE("masked freedom decides the first outcome") {
  Rng rng(2);
  ledger::Ledger l;
  PolicyConfig p;
  p.freedom = {FreedomKind::masked, {2}, {}};
  FreedomSource f(p.freedom);
  const auto spec = ledger::spec_for_pure_state(qcore::PureState::basis(4, 0));
  const auto r = measure_with_precedence(spec, Povm::computational_basis(4), l, p, f, rng);
  CHECK(r.outcome == 2);
  CHECK(r.regime == Regime::freedom);
  CHECK(r.seq_no == 0);
}

TEST_CASE("build-up policies") {
  Rng rng(3);
  const std::vector<std::int32_t> one{1};
  for (int i = 0; i < 100; ++i) CHECK(buildup_step(policy(10, Buildup::urn), one, std::nullopt, 2, rng) == 1);

  const std::vector<double> half{0.5, 0.5};
  std::uint64_t zeros = 0;
  for (int i = 0; i < 10'000; ++i)
    zeros += buildup_step(policy(10, Buildup::born_oracle), one, std::span<const double>(half), 2, rng) == 0;
  CHECK(std::abs(zeros / 1e4 - 0.5) <= 0.015);
  CHECK_THROWS_AS(buildup_step(policy(10, Buildup::born_oracle), one, std::nullopt, 2, rng), Error);

  const std::vector<std::int32_t> alternating{0, 1, 0, 1};
  CHECK(buildup_step(policy(10, Buildup::simplest_rule), alternating, std::nullopt, 2, rng) == 0);
}

TEST_CASE("precedent sampling reads only the multiset") {
  const std::vector<std::uint64_t> counts{700, 300};
  Rng rng(4);
  std::uint64_t zeros = 0;
  for (int i = 0; i < 10'000; ++i) zeros += sample_precedent(counts, rng) == 0;
  CHECK(std::abs(zeros / 1e4 - 0.7) <= 0.015);

  // Same counts reached in different orders give identical draws.
  const auto spec = plus_spec();
  const dynamics::MeasurementContext ctx(spec, Povm::computational_basis(2));
  ledger::Ledger forward;
  ledger::Ledger backward;
  for (int i = 0; i < 50; ++i) forward.record(ctx.prep_key(), ctx.meas_key(), i < 20 ? 0 : 1, 2);
  for (int i = 0; i < 50; ++i) backward.record(ctx.prep_key(), ctx.meas_key(), i < 30 ? 1 : 0, 2);
  const auto pol = policy(10, Buildup::urn);
  Rng a(99);
  Rng b(99);
  FreedomSource fa({});
  FreedomSource fb({});
  for (int i = 0; i < 1000; ++i) CHECK(measure(ctx, forward, pol, fa, a).outcome == measure(ctx, backward, pol, fb, b).outcome);
}

TEST_CASE("a threshold of one with urn build-up locks in") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto r = run_stream(plus_spec(), Povm::computational_basis(2), policy(1, Buildup::urn), 10'000, rng);
    CHECK(std::all_of(r.outcomes.begin(), r.outcomes.end(), [&](auto o) { return o == r.outcomes[0]; }));
  }
}

TEST_CASE("regime accounting") {
  Rng rng(5);
  auto r = run_stream(plus_spec(), Povm::computational_basis(2), policy(100, Buildup::born_oracle), 1, rng);
  CHECK(r.regime_counts == RegimeCounts{1, 0, 0});
  r = run_stream(plus_spec(), Povm::computational_basis(2), policy(100, Buildup::born_oracle), 1000, rng);
  CHECK(r.regime_counts == RegimeCounts{1, 99, 900});
  CHECK(r.regimes[0] == Regime::freedom);
  CHECK(r.regimes[99] == Regime::buildup);
  CHECK(r.regimes[100] == Regime::precedence);
  std::uint64_t total = 0;
  for (auto c : r.histogram) total += c;
  CHECK(total == 1000);
}

TEST_CASE("born-oracle build-up without a threshold converges") {
  Rng rng(6);
  const auto r = run_stream(plus_spec(), Povm::computational_basis(2),
                            policy(kUnboundedThreshold, Buildup::born_oracle), 100'000, rng);
  CHECK(tv_from(r.histogram, {0.5, 0.5}) <= 0.02);
}

TEST_CASE("precedence freezes build-up sampling error like a Polya urn") {
  // The first T = 100 outcomes are fair coin flips with fraction f; the
  // remaining N draws follow a Polya urn started from those m = 100 balls,
  // so Var(final fraction) = Var(f) + E[f(1-f)] N (m+N) / ((m+1) (m+N)^2).
  const double m = 100;
  const double total = 10'000;
  const double n = total - m;
  const double expected = 0.25 / m + (0.25 - 0.25 / m) * n * (m + n) / ((m + 1) * (m + n) * (m + n));
  const int runs = 400;
  double sum_sq = 0;
  int within_002 = 0;
  for (int run = 0; run < runs; ++run) {
    Rng rng = Rng::for_stream(2718, static_cast<std::uint64_t>(run));
    const auto r = run_stream(plus_spec(), Povm::computational_basis(2), policy(100, Buildup::born_oracle),
                              static_cast<std::uint64_t>(total), rng);
    const double dev = static_cast<double>(r.histogram[0]) / total - 0.5;
    sum_sq += dev * dev;
    within_002 += std::abs(dev) <= 0.02;
  }
  const double observed = sum_sq / runs;
  // 400 samples: relative standard error of the variance estimate is about 7%.
  CHECK(observed >= 0.8 * expected);
  CHECK(observed <= 1.2 * expected);
  // With sd near 0.07 most runs end farther than 0.02 from the Born vector.
  CHECK(within_002 < runs / 2);
}

TEST_CASE("streams are deterministic under a seed") {
  for (auto b : {Buildup::urn, Buildup::born_oracle, Buildup::simplest_rule}) {
    Rng r1(123);
    Rng r2(123);
    const auto a = run_stream(plus_spec(), Povm::computational_basis(2), policy(50, b), 2000, r1);
    const auto c = run_stream(plus_spec(), Povm::computational_basis(2), policy(50, b), 2000, r2);
    CHECK(a.outcomes == c.outcomes);
    CHECK((a.regimes == c.regimes));
  }
}

TEST_CASE("dimension mismatch is reported") {
  Rng rng(7);
  ledger::Ledger l;
  PolicyConfig p;
  FreedomSource f(p.freedom);
  try {
    measure_with_precedence(plus_spec(), Povm::computational_basis(3), l, p, f, rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
  CHECK(l.size() == 0);
}

TEST_CASE("an unbounded urn settles like a Polya urn") {
  int settled = 0;
  for (std::uint64_t run = 0; run < 200; ++run) {
    Rng rng = Rng::for_stream(31, run);
    const auto r = run_stream(plus_spec(), Povm::computational_basis(2), policy(kUnboundedThreshold, Buildup::urn),
                              10'000, rng);
    double last_1000 = 0;
    double last_5000 = 0;
    for (std::size_t i = 5000; i < 10'000; ++i) {
      last_5000 += r.outcomes[i];
      if (i >= 9000) last_1000 += r.outcomes[i];
    }
    settled += std::abs(last_1000 / 1000 - last_5000 / 5000) < 0.05;
  }
  CHECK(settled >= 190);
}

TEST_CASE("precedent draws after a Born pre-fill average to the Born vector") {
  qcore::Vector v(2);
  v << std::sqrt(0.3), std::sqrt(0.7);
  const auto spec = ledger::spec_for_pure_state(qcore::PureState::make(v));
  const auto povm = Povm::computational_basis(2);
  const dynamics::MeasurementContext ctx(spec, povm);
  std::vector<std::uint64_t> aggregate(2, 0);
  for (std::uint64_t run = 0; run < 100; ++run) {
    Rng rng = Rng::for_stream(77, run);
    ledger::Ledger l;
    experiments::prefill_sampled(l, ctx, 1000, rng);
    const auto r = run_stream(spec, povm, policy(1000, Buildup::born_oracle), 100, rng, l);
    CHECK(r.regime_counts.precedence == 100);
    for (std::size_t k = 0; k < 2; ++k) aggregate[k] += r.histogram[k];
  }
  CHECK(experiments::chi_square_gof(aggregate, ctx.born()).p_value > 0.01);
}
