#include "precedence/config.hpp"

#include <charconv>
#include <random>
#include <set>

#include "precedence/error.hpp"

namespace precedence::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::config, "config field '" + field + "': " + why);
}

/// Rejects any key of `obj` not in `allowed`.
void check_fields(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) bad(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) bad(where.empty() ? key : where + "." + key, "unknown field");
  }
}

std::string path(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

std::uint64_t get_u64(const json& obj, const std::string& where, std::string_view key, std::uint64_t fallback,
                      std::uint64_t min = 0) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
    bad(path(where, key), "expected a nonnegative integer");
  const auto v = it->get<std::uint64_t>();
  if (v < min) bad(path(where, key), "must be >= " + std::to_string(min));
  return v;
}

double get_double(const json& obj, const std::string& where, std::string_view key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) bad(path(where, key), "expected a number");
  return it->get<double>();
}

bool get_bool(const json& obj, const std::string& where, std::string_view key, bool fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) bad(path(where, key), "expected true or false");
  return it->get<bool>();
}

std::string get_string(const json& obj, const std::string& where, std::string_view key, std::string fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) bad(path(where, key), "expected a string");
  return it->get<std::string>();
}

template <typename Int>
std::vector<Int> get_int_list(const json& obj, const std::string& where, std::string_view key,
                              std::vector<Int> fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array()) bad(path(where, key), "expected an array of integers");
  std::vector<Int> out;
  for (const auto& v : *it) {
    if (!v.is_number_integer()) bad(path(where, key), "expected an array of integers");
    const auto x = v.get<std::int64_t>();
    if (x < 0) bad(path(where, key), "entries must be nonnegative");
    out.push_back(static_cast<Int>(x));
  }
  return out;
}

Amplitudes get_amplitudes(const json& obj, const std::string& where, std::string_view key, Amplitudes fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array() || it->empty()) bad(path(where, key), "expected a nonempty array of amplitudes");
  Amplitudes out;
  for (const auto& v : *it) {
    if (v.is_number()) {
      out.emplace_back(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out.emplace_back(v[0].get<double>(), v[1].get<double>());
    } else {
      bad(path(where, key), "each amplitude is a number or [re, im]");
    }
  }
  return out;
}

json amplitudes_json(const Amplitudes& a) {
  json out = json::array();
  for (const auto& z : a) out.push_back({z.real(), z.imag()});
  return out;
}

const char* to_string(Prefill p) {
  switch (p) {
    case Prefill::none: return "none";
    case Prefill::exact: return "exact";
    case Prefill::sampled: return "sampled";
  }
  return "none";
}

StudyKind study_from_string(const std::string& s) {
  if (s == "double_slit") return StudyKind::double_slit;
  if (s == "convergence") return StudyKind::convergence;
  if (s == "lock_in") return StudyKind::lock_in;
  if (s == "permutation") return StudyKind::permutation;
  if (s == "postulates") return StudyKind::postulates;
  if (s == "tomography") return StudyKind::tomography;
  bad("study", "unknown study '" + s + "'");
}

dynamics::PolicyConfig parse_policy(const json& obj) {
  const std::string w = "policy";
  check_fields(obj, w, {"threshold_T", "buildup", "freedom", "mask", "external_sequence", "key_mode"});
  dynamics::PolicyConfig p;
  if (const auto it = obj.find("threshold_T"); it != obj.end()) {
    if (it->is_string() && it->get<std::string>() == "infinite") {
      p.threshold = dynamics::kUnboundedThreshold;
    } else {
      p.threshold = get_u64(obj, w, "threshold_T", 1000, 1);
    }
  }
  try {
    p.buildup = dynamics::buildup_from_string(get_string(obj, w, "buildup", "born_oracle"));
  } catch (const Error& e) {
    bad("policy.buildup", e.what());
  }
  try {
    p.freedom.kind = dynamics::freedom_from_string(get_string(obj, w, "freedom", "uniform"));
  } catch (const Error& e) {
    bad("policy.freedom", e.what());
  }
  try {
    p.key_mode = ledger::key_mode_from_string(get_string(obj, w, "key_mode", "syntactic"));
  } catch (const Error& e) {
    bad("policy.key_mode", e.what());
  }
  p.freedom.mask = get_int_list<std::int32_t>(obj, w, "mask", {});
  p.freedom.external = get_int_list<std::int32_t>(obj, w, "external_sequence", {});
  if (p.freedom.kind == dynamics::FreedomKind::masked && p.freedom.mask.empty())
    bad("policy.mask", "a masked freedom source needs a nonempty mask");
  if (p.freedom.kind == dynamics::FreedomKind::seeded_external && p.freedom.external.empty())
    bad("policy.external_sequence", "a seeded_external freedom source needs a nonempty sequence");
  return p;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size()); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::parse, std::string(what) + ": malformed JSON at line " + std::to_string(line) +
                                      ", column " + std::to_string(column) + ": " + e.what());
  }
}

}  // namespace

const char* to_string(StudyKind s) noexcept {
  switch (s) {
    case StudyKind::double_slit: return "double_slit";
    case StudyKind::convergence: return "convergence";
    case StudyKind::lock_in: return "lock_in";
    case StudyKind::permutation: return "permutation";
    case StudyKind::postulates: return "postulates";
    case StudyKind::tomography: return "tomography";
  }
  return "unknown";
}

dynamics::PolicyConfig parse_policy_config(std::string_view text) {
  return parse_policy(parse_json(text, "policy"));
}

RunConfig parse_config(std::string_view text) {
  const json root = parse_json(text, "config");
  check_fields(root, "", {"study", "seed", "ledger_path", "output_dir", "policy", "double_slit", "convergence",
                          "lock_in", "permutation", "postulates", "tomography"});
  if (!root.contains("study")) bad("study", "required field missing");
  RunConfig c;
  c.study = study_from_string(get_string(root, "", "study", ""));
  const std::string study_name = to_string(c.study);
  for (const char* block : {"double_slit", "convergence", "lock_in", "permutation", "postulates", "tomography"})
    if (root.contains(block) && study_name != block) bad(block, "block does not belong to study '" + study_name + "'");

  if (root.contains("seed")) c.seed = get_u64(root, "", "seed", 0);
  if (root.contains("ledger_path")) c.ledger_path = get_string(root, "", "ledger_path", "");
  c.output_dir = get_string(root, "", "output_dir", c.output_dir);
  if (root.contains("policy")) c.policy = parse_policy(root["policy"]);

  const json empty = json::object();
  const json& block = root.contains(study_name) ? root[study_name] : empty;
  const std::string& w = study_name;
  switch (c.study) {
    case StudyKind::double_slit: {
      check_fields(block, w, {"n_bins", "n_photons", "wavelength", "slit_separation", "slit_width",
                              "screen_distance", "screen_half_width", "block_second_path"});
      auto& p = c.double_slit;
      p.screen.n_bins = get_u64(block, w, "n_bins", p.screen.n_bins, 2);
      p.n_photons = get_u64(block, w, "n_photons", p.n_photons, 1);
      p.screen.wavelength = get_double(block, w, "wavelength", p.screen.wavelength);
      p.screen.slit_separation = get_double(block, w, "slit_separation", p.screen.slit_separation);
      p.screen.slit_width = get_double(block, w, "slit_width", p.screen.slit_width);
      p.screen.screen_distance = get_double(block, w, "screen_distance", p.screen.screen_distance);
      p.screen.screen_half_width = get_double(block, w, "screen_half_width", p.screen.screen_half_width);
      p.block_second_path = get_bool(block, w, "block_second_path", p.block_second_path);
      break;
    }
    case StudyKind::convergence: {
      check_fields(block, w, {"state", "n_steps", "checkpoints", "prefill", "prefill_count"});
      auto& p = c.convergence;
      p.state = get_amplitudes(block, w, "state", p.state);
      p.n_steps = get_u64(block, w, "n_steps", p.n_steps, 1);
      p.checkpoints = get_int_list<std::uint64_t>(block, w, "checkpoints", {});
      const std::string prefill = get_string(block, w, "prefill", "none");
      if (prefill == "none") p.prefill = Prefill::none;
      else if (prefill == "exact") p.prefill = Prefill::exact;
      else if (prefill == "sampled") p.prefill = Prefill::sampled;
      else bad("convergence.prefill", "expected none, exact or sampled");
      p.prefill_count = get_u64(block, w, "prefill_count", 0);
      if (p.checkpoints.empty())
        for (std::uint64_t step = 1; step <= p.n_steps; step *= 10) p.checkpoints.push_back(step);
      if (p.checkpoints.empty() || p.checkpoints.back() != p.n_steps) p.checkpoints.push_back(p.n_steps);
      for (std::size_t i = 1; i < p.checkpoints.size(); ++i)
        if (p.checkpoints[i] <= p.checkpoints[i - 1]) bad("convergence.checkpoints", "must be strictly increasing");
      if (p.checkpoints.back() > p.n_steps) bad("convergence.checkpoints", "must not exceed n_steps");
      break;
    }
    case StudyKind::lock_in: {
      check_fields(block, w, {"state", "n_runs", "run_length"});
      auto& p = c.lock_in;
      p.state = get_amplitudes(block, w, "state", p.state);
      p.n_runs = get_u64(block, w, "n_runs", p.n_runs, 1);
      p.run_length = get_u64(block, w, "run_length", p.run_length, 1);
      break;
    }
    case StudyKind::permutation: {
      check_fields(block, w, {"sequence", "sequence_length", "n_outcomes", "n_perms", "n_draws"});
      auto& p = c.permutation;
      p.sequence = get_int_list<std::int32_t>(block, w, "sequence", {});
      p.sequence_length = get_u64(block, w, "sequence_length", p.sequence_length, 2);
      p.n_outcomes = get_u64(block, w, "n_outcomes", p.n_outcomes, 1);
      p.n_perms = get_u64(block, w, "n_perms", p.n_perms, 1);
      p.n_draws = get_u64(block, w, "n_draws", p.n_draws, 1);
      if (!p.sequence.empty() && p.sequence.size() < 2) bad("permutation.sequence", "needs at least 2 outcomes");
      break;
    }
    case StudyKind::postulates: {
      check_fields(block, w, {"max_n"});
      c.postulates.max_n = get_u64(block, w, "max_n", c.postulates.max_n, 2);
      break;
    }
    case StudyKind::tomography: {
      check_fields(block, w, {"dims", "n_states", "noise"});
      auto& p = c.tomography;
      p.dims = get_int_list<std::uint64_t>(block, w, "dims", p.dims);
      for (auto d : p.dims)
        if (d < 2) bad("tomography.dims", "dimensions must be >= 2");
      p.n_states = get_u64(block, w, "n_states", p.n_states, 1);
      p.noise = get_double(block, w, "noise", p.noise);
      if (!(p.noise >= 0.0)) bad("tomography.noise", "must be nonnegative");
      break;
    }
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["study"] = to_string(c.study);
  if (c.seed) j["seed"] = *c.seed;
  if (c.ledger_path) j["ledger_path"] = *c.ledger_path;
  json policy;
  if (c.policy.threshold == dynamics::kUnboundedThreshold) policy["threshold_T"] = "infinite";
  else policy["threshold_T"] = c.policy.threshold;
  policy["buildup"] = dynamics::to_string(c.policy.buildup);
  policy["freedom"] = dynamics::to_string(c.policy.freedom.kind);
  policy["mask"] = c.policy.freedom.mask;
  policy["external_sequence"] = c.policy.freedom.external;
  policy["key_mode"] = ledger::to_string(c.policy.key_mode);
  j["policy"] = policy;
  switch (c.study) {
    case StudyKind::double_slit: {
      const auto& p = c.double_slit;
      j["double_slit"] = {{"n_bins", p.screen.n_bins},
                          {"n_photons", p.n_photons},
                          {"wavelength", p.screen.wavelength},
                          {"slit_separation", p.screen.slit_separation},
                          {"slit_width", p.screen.slit_width},
                          {"screen_distance", p.screen.screen_distance},
                          {"screen_half_width", p.screen.screen_half_width},
                          {"block_second_path", p.block_second_path}};
      break;
    }
    case StudyKind::convergence: {
      const auto& p = c.convergence;
      j["convergence"] = {{"state", amplitudes_json(p.state)},
                          {"n_steps", p.n_steps},
                          {"checkpoints", p.checkpoints},
                          {"prefill", to_string(p.prefill)},
                          {"prefill_count", p.prefill_count}};
      break;
    }
    case StudyKind::lock_in: {
      const auto& p = c.lock_in;
      j["lock_in"] = {{"state", amplitudes_json(p.state)}, {"n_runs", p.n_runs}, {"run_length", p.run_length}};
      break;
    }
    case StudyKind::permutation: {
      const auto& p = c.permutation;
      j["permutation"] = {{"sequence", p.sequence},
                          {"sequence_length", p.sequence_length},
                          {"n_outcomes", p.n_outcomes},
                          {"n_perms", p.n_perms},
                          {"n_draws", p.n_draws}};
      break;
    }
    case StudyKind::postulates:
      j["postulates"] = {{"max_n", c.postulates.max_n}};
      break;
    case StudyKind::tomography:
      j["tomography"] = {{"dims", c.tomography.dims}, {"n_states", c.tomography.n_states}, {"noise", c.tomography.noise}};
      break;
  }
  return j;
}

std::uint64_t resolve_seed(RunConfig& config, const char* env_seed) {
  if (env_seed && *env_seed) {
    const std::string_view s(env_seed);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw Error(ErrorCode::config, "PRECEDENCE_SEED: expected an unsigned 64-bit integer, got '" + std::string(s) + "'");
    config.seed = v;
  } else if (!config.seed) {
    std::random_device rd;
    config.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return *config.seed;
}

}  // namespace precedence::config
