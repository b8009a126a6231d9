#include "precedence/dynamics.hpp"

#include <algorithm>

#include "precedence/error.hpp"
#include "precedence/rule_induction.hpp"

namespace precedence::dynamics {

const char* to_string(Buildup b) noexcept {
  switch (b) {
    case Buildup::urn: return "urn";
    case Buildup::born_oracle: return "born_oracle";
    case Buildup::simplest_rule: return "simplest_rule";
  }
  return "unknown";
}

const char* to_string(FreedomKind f) noexcept {
  switch (f) {
    case FreedomKind::uniform: return "uniform";
    case FreedomKind::seeded_external: return "seeded_external";
    case FreedomKind::masked: return "masked";
  }
  return "unknown";
}

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::freedom: return "freedom";
    case Regime::buildup: return "buildup";
    case Regime::precedence: return "precedence";
  }
  return "unknown";
}

Buildup buildup_from_string(std::string_view s) {
  if (s == "urn") return Buildup::urn;
  if (s == "born_oracle") return Buildup::born_oracle;
  if (s == "simplest_rule") return Buildup::simplest_rule;
  throw Error(ErrorCode::config, "unknown buildup policy '" + std::string(s) + "'");
}

FreedomKind freedom_from_string(std::string_view s) {
  if (s == "uniform") return FreedomKind::uniform;
  if (s == "seeded_external") return FreedomKind::seeded_external;
  if (s == "masked") return FreedomKind::masked;
  throw Error(ErrorCode::config, "unknown freedom source '" + std::string(s) + "'");
}

void PolicyConfig::validate() const {
  if (threshold < 1) throw Error(ErrorCode::config, "policy: threshold_T must be >= 1");
  if (freedom.kind == FreedomKind::masked && freedom.mask.empty())
    throw Error(ErrorCode::config, "policy: masked freedom source needs a nonempty mask");
  if (freedom.kind == FreedomKind::seeded_external && freedom.external.empty())
    throw Error(ErrorCode::config, "policy: seeded_external freedom source needs a sequence");
  for (std::int32_t o : freedom.mask)
    if (o < 0) throw Error(ErrorCode::config, "policy: negative outcome in mask");
  for (std::int32_t o : freedom.external)
    if (o < 0) throw Error(ErrorCode::config, "policy: negative outcome in external sequence");
}

FreedomSource::FreedomSource(FreedomConfig config) : config_(std::move(config)) {}

std::int32_t FreedomSource::draw(std::size_t n_outcomes, Rng& rng) {
  if (n_outcomes == 0) throw Error(ErrorCode::invalid_argument, "freedom: no outcomes");
  switch (config_.kind) {
    case FreedomKind::uniform:
      return static_cast<std::int32_t>(rng.uniform_index(n_outcomes));
    case FreedomKind::masked: {
      if (config_.mask.empty()) throw Error(ErrorCode::invalid_argument, "freedom: empty allowed-outcome mask");
      for (std::int32_t o : config_.mask)
        if (o < 0 || static_cast<std::size_t>(o) >= n_outcomes)
          throw Error(ErrorCode::invalid_argument, "freedom: masked outcome " + std::to_string(o) + " out of range");
      return config_.mask[rng.uniform_index(config_.mask.size())];
    }
    case FreedomKind::seeded_external: {
      if (cursor_ >= config_.external.size())
        throw Error(ErrorCode::out_of_range, "freedom: external sequence exhausted after " +
                                                 std::to_string(cursor_) + " outcomes");
      const std::int32_t o = config_.external[cursor_];
      if (o < 0 || static_cast<std::size_t>(o) >= n_outcomes)
        throw Error(ErrorCode::invalid_argument, "freedom: external outcome " + std::to_string(o) + " out of range");
      ++cursor_;
      return o;
    }
  }
  throw Error(ErrorCode::invalid_state, "freedom: unknown source");
}

std::int32_t sample_precedent(std::span<const std::uint64_t> counts, Rng& rng) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw Error(ErrorCode::invalid_argument, "sample_precedent: empty ensemble");
  std::uint64_t pick = rng.uniform_index(total);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (pick < counts[k]) return static_cast<std::int32_t>(k);
    pick -= counts[k];
  }
  throw Error(ErrorCode::invalid_state, "sample_precedent: inconsistent counts");
}

std::int32_t buildup_step(const PolicyConfig& policy, std::span<const std::int32_t> prefix,
                          std::optional<std::span<const double>> born, std::size_t n_outcomes, Rng& rng) {
  if (prefix.empty() || prefix.size() >= policy.threshold)
    throw Error(ErrorCode::invalid_argument, "buildup_step: prefix length must be in [1, T)");
  switch (policy.buildup) {
    case Buildup::urn: {
      std::vector<std::uint64_t> counts(n_outcomes, 0);
      for (std::int32_t o : prefix) {
        if (o < 0 || static_cast<std::size_t>(o) >= n_outcomes)
          throw Error(ErrorCode::invalid_argument, "buildup_step: prefix outcome out of range");
        ++counts[static_cast<std::size_t>(o)];
      }
      return sample_precedent(counts, rng);
    }
    case Buildup::born_oracle: {
      if (!born) throw Error(ErrorCode::invalid_argument, "buildup_step: born_oracle requires a Born vector");
      if (born->size() != n_outcomes) throw Error(ErrorCode::dimension_mismatch, "buildup_step: Born vector length");
      return static_cast<std::int32_t>(rng.categorical(*born));
    }
    case Buildup::simplest_rule: {
      const auto window = prefix.first(std::min(prefix.size(), rules::kMaxPrefix));
      const auto rule = rules::simplest_rule_induct(window, n_outcomes);
      return rule.continuation(prefix.size(), rng);
    }
  }
  throw Error(ErrorCode::invalid_state, "buildup_step: unknown policy");
}

MeasurementContext::MeasurementContext(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                                       ledger::KeyMode mode) {
  const qcore::DensityMatrix rho = ledger::replay(spec);
  if (rho.dim() != povm.dim())
    throw Error(ErrorCode::dimension_mismatch, "measurement: state dimension " + std::to_string(rho.dim()) +
                                                   " does not match POVM dimension " + std::to_string(povm.dim()));
  prep_ = ledger::canonical_key(spec, mode);
  meas_ = ledger::measurement_key(povm);
  born_ = qcore::born_probabilities(rho, povm);
}

MeasureResult measure(const MeasurementContext& ctx, ledger::Ledger& ledger, const PolicyConfig& policy,
                      FreedomSource& freedom, Rng& rng) {
  const std::uint64_t n = ledger.count(ctx.prep_key(), ctx.meas_key());
  MeasureResult result;
  if (n == 0) {
    result.regime = Regime::freedom;
    result.outcome = freedom.draw(ctx.n_outcomes(), rng);
  } else if (n >= policy.threshold) {
    result.regime = Regime::precedence;
    result.outcome = sample_precedent(ledger.counts(ctx.prep_key(), ctx.meas_key()), rng);
  } else if (policy.buildup == Buildup::urn) {
    // The prefix is the whole stream, so its multiset is the ledger's counts.
    result.regime = Regime::buildup;
    result.outcome = sample_precedent(ledger.counts(ctx.prep_key(), ctx.meas_key()), rng);
  } else {
    result.regime = Regime::buildup;
    result.outcome = buildup_step(policy, ledger.sequence(ctx.prep_key(), ctx.meas_key()),
                                  std::span<const double>(ctx.born()), ctx.n_outcomes(), rng);
  }
  result.seq_no = ledger.record(ctx.prep_key(), ctx.meas_key(), result.outcome, ctx.n_outcomes());
  return result;
}

MeasureResult measure_with_precedence(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                                      ledger::Ledger& ledger, const PolicyConfig& policy, FreedomSource& freedom,
                                      Rng& rng) {
  policy.validate();
  const MeasurementContext ctx(spec, povm, policy.key_mode);
  return measure(ctx, ledger, policy, freedom, rng);
}

StreamResult run_stream(const ledger::PreparationSpec& spec, const qcore::Povm& povm, const PolicyConfig& policy,
                        std::uint64_t n_steps, Rng& rng, ledger::Ledger& ledger) {
  if (n_steps < 1) throw Error(ErrorCode::invalid_argument, "run_stream: n_steps must be >= 1");
  policy.validate();
  const MeasurementContext ctx(spec, povm, policy.key_mode);
  FreedomSource freedom(policy.freedom);
  StreamResult out;
  out.born = ctx.born();
  out.histogram.assign(ctx.n_outcomes(), 0);
  out.outcomes.reserve(n_steps);
  out.regimes.reserve(n_steps);
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    const MeasureResult r = measure(ctx, ledger, policy, freedom, rng);
    out.outcomes.push_back(r.outcome);
    out.regimes.push_back(r.regime);
    ++out.histogram[static_cast<std::size_t>(r.outcome)];
    switch (r.regime) {
      case Regime::freedom: ++out.regime_counts.freedom; break;
      case Regime::buildup: ++out.regime_counts.buildup; break;
      case Regime::precedence: ++out.regime_counts.precedence; break;
    }
  }
  if (policy.buildup == Buildup::simplest_rule)
    out.continuation_note = "deterministic continuation for constant/periodic rules, sampled for iid";
  return out;
}

StreamResult run_stream(const ledger::PreparationSpec& spec, const qcore::Povm& povm, const PolicyConfig& policy,
                        std::uint64_t n_steps, Rng& rng) {
  ledger::Ledger scratch;
  return run_stream(spec, povm, policy, n_steps, rng, scratch);
}

}  // namespace precedence::dynamics
