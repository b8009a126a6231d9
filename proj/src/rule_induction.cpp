#include "precedence/rule_induction.hpp"

#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "precedence/error.hpp"

namespace precedence::rules {
namespace {

using boost::multiprecision::cpp_int;

struct Term {
  std::size_t outcome;
  std::uint32_t count;
};

cpp_int power(std::uint32_t base, std::uint32_t exp) {
  return boost::multiprecision::pow(cpp_int(base), exp);
}

/// True when raising slot i from a_i to a_i + 1 gains strictly more
/// likelihood than raising slot j.
bool better_increment(const Term& ti, std::uint32_t ai, const Term& tj, std::uint32_t aj) {
  const long double gi = ti.count * (std::log(static_cast<long double>(ai) + 1) - std::log(static_cast<long double>(ai)));
  const long double gj = tj.count * (std::log(static_cast<long double>(aj) + 1) - std::log(static_cast<long double>(aj)));
  const long double scale = std::max(gi, gj);
  if (std::abs(gi - gj) > 1e-12L * scale) return gi > gj;
  return power(ai + 1, ti.count) * power(aj, tj.count) > power(aj + 1, tj.count) * power(ai, ti.count);
}

/// Allocation of `budget` units (each slot >= 1) maximizing prod a_i^c_i.
/// Greedy unit increments are optimal for this separable concave objective.
std::vector<std::uint32_t> max_likelihood_allocation(std::span<const Term> terms, std::uint32_t budget) {
  std::vector<std::uint32_t> a(terms.size(), 1);
  for (std::uint32_t left = budget - static_cast<std::uint32_t>(terms.size()); left > 0; --left) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < terms.size(); ++k)
      if (better_increment(terms[k], a[k], terms[best], a[best])) best = k;
    ++a[best];
  }
  return a;
}

cpp_int product(std::span<const Term> terms, std::span<const std::uint32_t> a) {
  cpp_int p = 1;
  for (std::size_t k = 0; k < terms.size(); ++k) p *= power(a[k], terms[k].count);
  return p;
}

std::uint32_t floor_log2(const cpp_int& v) {
  return static_cast<std::uint32_t>(boost::multiprecision::msb(v));
}

RuleDescription induce_iid(std::span<const std::int32_t> prefix, std::size_t n_outcomes) {
  std::vector<std::uint32_t> counts(n_outcomes, 0);
  for (std::int32_t o : prefix) ++counts[static_cast<std::size_t>(o)];
  std::vector<Term> terms;
  for (std::size_t k = 0; k < n_outcomes; ++k)
    if (counts[k]) terms.push_back({k, counts[k]});

  const auto ml = max_likelihood_allocation(terms, kIidDenominator);
  const cpp_int best = product(terms, ml);

  // Lexicographically smallest allocation attaining the maximum likelihood.
  // For a fixed slot value v the best completion is log-concave in v, so the
  // optimal values of each slot form an interval around the ML value.
  std::vector<std::uint32_t> chosen(terms.size(), 0);
  cpp_int fixed = 1;
  std::uint32_t budget = kIidDenominator;
  for (std::size_t t = 0; t + 1 < terms.size(); ++t) {
    const std::span<const Term> rest(terms.data() + t + 1, terms.size() - t - 1);
    const std::span<const Term> here(terms.data() + t, terms.size() - t);
    std::uint32_t v = max_likelihood_allocation(here, budget)[0];
    while (v > 1) {
      const std::uint32_t trial = v - 1;
      const auto completion = max_likelihood_allocation(rest, budget - trial);
      if (fixed * power(trial, terms[t].count) * product(rest, completion) != best) break;
      v = trial;
    }
    chosen[t] = v;
    fixed *= power(v, terms[t].count);
    budget -= v;
  }
  chosen.back() = budget;

  RuleDescription rule;
  rule.rule_class = RuleClass::iid;
  rule.params.assign(n_outcomes, 0);
  long double log2l = 0.0L;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    rule.params[terms[k].outcome] = static_cast<std::int32_t>(chosen[k]);
    log2l += terms[k].count * (std::log2(static_cast<long double>(chosen[k])) - 6.0L);
  }
  const cpp_int p = product(terms, chosen);
  rule.description_length = 2 + 6 * static_cast<std::uint32_t>(n_outcomes);
  rule.data_bits = 6 * static_cast<std::uint32_t>(prefix.size()) - floor_log2(p);
  rule.log2_likelihood = static_cast<double>(log2l);
  return rule;
}

/// Strict "a beats b" under the documented ordering (iid never ties with
/// another iid candidate since only one is produced).
bool beats(const RuleDescription& a, const RuleDescription& b) {
  if (a.total_bits() != b.total_bits()) return a.total_bits() < b.total_bits();
  if (a.description_length != b.description_length) return a.description_length < b.description_length;
  if (a.rule_class != b.rule_class) return a.rule_class < b.rule_class;
  if (a.log2_likelihood != b.log2_likelihood) return a.log2_likelihood > b.log2_likelihood;
  return a.params < b.params;
}

}  // namespace

static_assert(kIidDenominator == 64, "iid numerators are encoded in 6 bits");

const char* to_string(RuleClass c) noexcept {
  switch (c) {
    case RuleClass::constant: return "constant";
    case RuleClass::periodic: return "periodic";
    case RuleClass::iid: return "iid";
  }
  return "unknown";
}

std::uint32_t outcome_bits(std::size_t n_outcomes) {
  std::uint32_t bits = 0;
  while ((std::size_t{1} << bits) < n_outcomes) ++bits;
  return bits;
}

std::int32_t RuleDescription::continuation(std::size_t index, Rng& rng) const {
  switch (rule_class) {
    case RuleClass::constant: return params.at(0);
    case RuleClass::periodic: return params.at(index % params.size());
    case RuleClass::iid: {
      std::vector<double> w(params.begin(), params.end());
      return static_cast<std::int32_t>(rng.categorical(w));
    }
  }
  throw Error(ErrorCode::invalid_state, "rule: unknown class");
}

RuleDescription simplest_rule_induct(std::span<const std::int32_t> prefix, std::size_t n_outcomes) {
  if (prefix.empty()) throw Error(ErrorCode::invalid_argument, "simplest_rule_induct: empty prefix");
  if (prefix.size() > kMaxPrefix)
    throw Error(ErrorCode::invalid_argument, "simplest_rule_induct: prefix longer than 64");
  if (n_outcomes == 0) throw Error(ErrorCode::invalid_argument, "simplest_rule_induct: no outcomes");
  for (std::int32_t o : prefix)
    if (o < 0 || static_cast<std::size_t>(o) >= n_outcomes)
      throw Error(ErrorCode::invalid_argument, "simplest_rule_induct: outcome out of range");

  const std::uint32_t b = outcome_bits(n_outcomes);
  RuleDescription best = induce_iid(prefix, n_outcomes);

  bool constant = true;
  for (std::int32_t o : prefix) constant = constant && o == prefix[0];
  if (constant) {
    RuleDescription c;
    c.rule_class = RuleClass::constant;
    c.params = {prefix[0]};
    c.description_length = 2 + b;
    if (beats(c, best)) best = c;
  }

  for (std::size_t p = 1; p <= kMaxPeriod; ++p) {
    bool fits = true;
    for (std::size_t i = p; i < prefix.size() && fits; ++i) fits = prefix[i] == prefix[i % p];
    if (!fits) continue;
    RuleDescription r;
    r.rule_class = RuleClass::periodic;
    r.params.assign(p, 0);
    for (std::size_t i = 0; i < std::min(p, prefix.size()); ++i) r.params[i] = prefix[i];
    r.description_length = 5 + static_cast<std::uint32_t>(p) * b;
    if (beats(r, best)) best = r;
  }
  return best;
}

std::string describe(const RuleDescription& rule) {
  std::ostringstream os;
  os << to_string(rule.rule_class) << "(";
  for (std::size_t i = 0; i < rule.params.size(); ++i) os << (i ? "," : "") << rule.params[i];
  if (rule.rule_class == RuleClass::iid) os << " /64";
  os << ") bits=" << rule.description_length << "+" << rule.data_bits;
  return os.str();
}

}  // namespace precedence::rules
