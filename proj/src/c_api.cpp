#include "precedence/precedence.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "precedence/config.hpp"
#include "precedence/dynamics.hpp"
#include "precedence/error.hpp"
#include "precedence/freedom_count.hpp"
#include "precedence/ledger.hpp"
#include "precedence/study.hpp"

struct prec_ledger {
  precedence::ledger::Ledger ledger;
};

struct prec_engine {
  precedence::dynamics::PolicyConfig policy;
  precedence::dynamics::FreedomSource freedom;
  precedence::Rng rng;
  prec_ledger* ledger;
};

namespace {

thread_local std::string last_error;

prec_status fail(prec_status status, const char* message) {
  last_error = message;
  return status;
}

template <class Fn>
prec_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return PREC_OK;
  } catch (const precedence::Error& e) {
    return fail(static_cast<prec_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PREC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PREC_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw precedence::Error(precedence::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* prec_version(void) { return PRECEDENCE_VERSION; }

const char* prec_status_name(prec_status status) {
  if (status == PREC_OK) return "ok";
  if (status == PREC_ERR_INTERNAL) return "internal";
  if (status >= PREC_ERR_INVALID_ARGUMENT && status <= PREC_ERR_CONFIG)
    return precedence::to_string(static_cast<precedence::ErrorCode>(status));
  return "unknown";
}

const char* prec_last_error(void) { return last_error.c_str(); }

void prec_string_free(char* s) { std::free(s); }

prec_status prec_ledger_create(prec_ledger** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new prec_ledger{};
  });
}

prec_status prec_ledger_load(const char* path, prec_ledger** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    auto handle = std::make_unique<prec_ledger>(prec_ledger{precedence::ledger::load_ledger(path)});
    *out = handle.release();
  });
}

prec_status prec_ledger_save(const prec_ledger* ledger, const char* path) {
  return guarded([&] {
    require(ledger != nullptr && path != nullptr, "ledger and path must not be NULL");
    precedence::ledger::save_ledger(ledger->ledger, path);
  });
}

void prec_ledger_destroy(prec_ledger* ledger) { delete ledger; }

prec_status prec_ledger_size(const prec_ledger* ledger, uint64_t* out) {
  return guarded([&] {
    require(ledger != nullptr && out != nullptr, "ledger and out must not be NULL");
    *out = ledger->ledger.size();
  });
}

prec_status prec_ledger_inspect(const prec_ledger* ledger, const char* filter, char** out_text) {
  return guarded([&] {
    require(ledger != nullptr && out_text != nullptr, "ledger and out_text must not be NULL");
    *out_text = dup_string(precedence::ledger::inspect(ledger->ledger, filter ? filter : ""));
  });
}

prec_status prec_postulate_report(uint32_t max_n, char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "out_json must not be NULL");
    *out_json = dup_string(precedence::freedom::postulate_report(max_n).dump(2));
  });
}

prec_status prec_run_config(const char* config_json, const char* out_dir, const char* env_seed, char** out_summary) {
  return guarded([&] {
    require(config_json != nullptr && out_summary != nullptr, "config_json and out_summary must not be NULL");
    auto config = precedence::config::parse_config(config_json);
    precedence::config::resolve_seed(config, env_seed);
    const std::string dir = out_dir ? out_dir : config.output_dir;
    *out_summary = dup_string(precedence::study::run_study(config, dir).dump(2));
  });
}

prec_status prec_engine_create(const char* policy_json, uint64_t seed, prec_ledger* ledger, prec_engine** out) {
  return guarded([&] {
    require(policy_json != nullptr && ledger != nullptr && out != nullptr,
            "policy_json, ledger and out must not be NULL");
    auto policy = precedence::config::parse_policy_config(policy_json);
    policy.validate();
    *out = new prec_engine{policy, precedence::dynamics::FreedomSource(policy.freedom), precedence::Rng(seed), ledger};
  });
}

void prec_engine_destroy(prec_engine* engine) { delete engine; }

prec_status prec_engine_measure_pure(prec_engine* engine, const double* re, const double* im, size_t dim,
                                     int32_t* out_outcome, prec_regime* out_regime) {
  return guarded([&] {
    require(engine != nullptr && re != nullptr && out_outcome != nullptr, "engine, re and out_outcome must not be NULL");
    require(dim >= 1, "dim must be at least 1");
    namespace q = precedence::qcore;
    q::Vector v(static_cast<Eigen::Index>(dim));
    for (size_t k = 0; k < dim; ++k) v(static_cast<Eigen::Index>(k)) = q::Complex(re[k], im ? im[k] : 0.0);
    const auto spec = precedence::ledger::spec_for_pure_state(q::PureState::make(v));
    const auto povm = q::Povm::computational_basis(dim);
    const auto r = precedence::dynamics::measure_with_precedence(spec, povm, engine->ledger->ledger, engine->policy,
                                                                  engine->freedom, engine->rng);
    *out_outcome = r.outcome;
    if (out_regime) *out_regime = static_cast<prec_regime>(static_cast<int>(r.regime));
  });
}

}  // extern "C"
