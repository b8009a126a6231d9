#include "doctest.h"
#include "oracles/mdl_oracle.hpp"
#include "precedence/error.hpp"
#include "precedence/rule_induction.hpp"

using namespace precedence;
using namespace precedence::rules;

namespace {

RuleDescription induct(std::vector<std::int32_t> prefix, std::size_t n = 2) { return simplest_rule_induct(prefix, n); }

void check_against_oracle(const std::vector<std::int32_t>& prefix, std::size_t n) {
  const auto got = simplest_rule_induct(prefix, n);
  const auto want = oracle::mdl_oracle(prefix, n);
  CHECK(static_cast<int>(got.rule_class) == want.rule_class);
  CHECK(got.params == want.params);
  CHECK(got.description_length == want.description_bits);
  CHECK(got.data_bits == want.data_bits);
}

}  // namespace

TEST_CASE("encoding constants") {
  CHECK(outcome_bits(1) == 0);
  CHECK(outcome_bits(2) == 1);
  CHECK(outcome_bits(3) == 2);
  CHECK(outcome_bits(4) == 2);
  CHECK(outcome_bits(5) == 3);
}

TEST_CASE("simple prefixes") {
  auto r = induct({1, 1, 1, 1});
  CHECK(r.rule_class == RuleClass::constant);
  CHECK(r.params == std::vector<std::int32_t>{1});
  CHECK(r.total_bits() == 3);

  r = induct({0, 1, 0, 1, 0, 1});
  CHECK(r.rule_class == RuleClass::periodic);
  CHECK(r.params == std::vector<std::int32_t>{0, 1});
  CHECK(r.description_length == 7);
  CHECK(r.data_bits == 0);

  Rng rng(0);
  CHECK(induct({0, 1, 0, 1}).continuation(4, rng) == 0);
}

TEST_CASE("short prefixes are always fit by some period") {
  // Repeats with period 6: positions 6 and 7 equal positions 0 and 1.
  auto r = induct({0, 1, 1, 0, 1, 0, 0, 1});
  CHECK(r.rule_class == RuleClass::periodic);
  CHECK(r.params == std::vector<std::int32_t>{0, 1, 1, 0, 1, 0});
  CHECK(r.total_bits() == 11);
  // No period below 8 fits, so the whole prefix becomes the pattern.
  r = induct({0, 0, 1, 0, 1, 1, 1, 1});
  CHECK(r.params == std::vector<std::int32_t>{0, 0, 1, 0, 1, 1, 1, 1});
  CHECK(r.total_bits() == 13);
  // Seven symbols with no shorter period.
  r = induct({1, 0, 1, 1, 1, 0, 0}, 2);
  CHECK(r.params == std::vector<std::int32_t>{1, 0, 1, 1, 1, 0, 0});
  CHECK(r.total_bits() == 12);
}

TEST_CASE("aperiodic prefixes fall back to maximum-likelihood iid") {
  // 16 symbols, 8 of each, no period <= 8.
  const std::vector<std::int32_t> prefix{0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0};
  const auto r = induct(prefix);
  CHECK(r.rule_class == RuleClass::iid);
  CHECK(r.params == std::vector<std::int32_t>{32, 32});
  CHECK(r.description_length == 14);
  CHECK(r.data_bits == 16);
  check_against_oracle(prefix, 2);

  // Numerators 42..53 for outcome 0 all reach the minimal data bits here;
  // only the exact likelihood separates them.
  std::vector<std::int32_t> skewed(20, 0);
  for (int i : {2, 7, 10, 16, 19}) skewed[static_cast<std::size_t>(i)] = 1;
  const auto skew = induct(skewed);
  check_against_oracle(skewed, 2);
  CHECK(skew.rule_class == RuleClass::iid);
  CHECK(skew.params == std::vector<std::int32_t>{48, 16});
}

TEST_CASE("invalid prefixes") {
  CHECK_THROWS_AS(induct({}), Error);
  CHECK_THROWS_AS(induct({0, 2}), Error);
  CHECK_THROWS_AS(induct(std::vector<std::int32_t>(65, 0)), Error);
  CHECK(induct(std::vector<std::int32_t>(64, 0)).rule_class == RuleClass::constant);
}

TEST_CASE("agreement with exhaustive scoring, ternary alphabet") {
  Rng rng(77);
  for (int k = 0; k < 300; ++k) {
    const std::size_t len = 1 + rng.uniform_index(7);
    std::vector<std::int32_t> prefix(len);
    for (auto& o : prefix) o = static_cast<std::int32_t>(rng.uniform_index(3));
    check_against_oracle(prefix, 3);
  }
}

TEST_CASE("agreement with exhaustive scoring, long binary prefixes") {
  Rng rng(78);
  for (int k = 0; k < 40; ++k) {
    const std::size_t len = 13 + rng.uniform_index(52);
    std::vector<std::int32_t> prefix(len);
    const double bias = rng.uniform01();
    for (auto& o : prefix) o = rng.uniform01() < bias ? 1 : 0;
    check_against_oracle(prefix, 2);
  }
}

TEST_CASE("induced rule reproduces deterministic prefixes") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const std::size_t p = 1 + rng.uniform_index(8);
    std::vector<std::int32_t> pattern(p);
    for (auto& o : pattern) o = static_cast<std::int32_t>(rng.uniform_index(2));
    std::vector<std::int32_t> prefix(p + rng.uniform_index(20));
    for (std::size_t i = 0; i < prefix.size(); ++i) prefix[i] = pattern[i % p];
    const auto r = induct(prefix);
    REQUIRE(r.rule_class != RuleClass::iid);
    for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(r.continuation(i, rng) == prefix[i]);
  }
}
