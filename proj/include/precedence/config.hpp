#pragma once

// Run configuration: a strict JSON document naming one study, the precedence
// policy, and the study's parameters. Unknown fields anywhere are rejected.
//
//   {
//     "study": "convergence",
//     "seed": 42,                      // optional; generated when absent
//     "ledger_path": "shared.jsonl",   // optional; loaded if present, saved after
//     "output_dir": "out",             // optional; --out overrides
//     "policy": {"threshold_T": 1000, "buildup": "born_oracle",
//                "freedom": "uniform", "mask": [], "external_sequence": [],
//                "key_mode": "syntactic"},
//     "convergence": {...}             // block named after the study, optional
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "precedence/dynamics.hpp"
#include "precedence/experiments.hpp"

namespace precedence::config {

enum class StudyKind { double_slit, convergence, lock_in, permutation, postulates, tomography };

const char* to_string(StudyKind s) noexcept;

/// Amplitudes of the measured qubit/qudit; measured in the computational basis.
using Amplitudes = std::vector<qcore::Complex>;

struct DoubleSlitParams {
  experiments::FarFieldParams screen;
  std::uint64_t n_photons = 100'000;
  bool block_second_path = false;
};

enum class Prefill { none, exact, sampled };

struct ConvergenceParams {
  Amplitudes state{1.0, 1.0};
  std::uint64_t n_steps = 100'000;
  std::vector<std::uint64_t> checkpoints;  // empty: decades up to n_steps
  Prefill prefill = Prefill::none;
  std::uint64_t prefill_count = 0;
};

struct LockInParams {
  Amplitudes state{1.0, 1.0};
  std::uint64_t n_runs = 1000;
  std::uint64_t run_length = 1000;
};

struct PermutationParams {
  std::vector<std::int32_t> sequence;  // empty: random sequence
  std::uint64_t sequence_length = 1000;
  std::uint64_t n_outcomes = 2;
  std::uint64_t n_perms = 20;
  std::uint64_t n_draws = 10'000;
};

struct PostulatesParams {
  std::uint64_t max_n = 5;
};

struct TomographyParams {
  std::vector<std::uint64_t> dims{2, 3};
  std::uint64_t n_states = 50;
  double noise = 0.0;
};

struct RunConfig {
  StudyKind study = StudyKind::convergence;
  dynamics::PolicyConfig policy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ledger_path;
  std::string output_dir = "out";

  DoubleSlitParams double_slit;
  ConvergenceParams convergence;
  LockInParams lock_in;
  PermutationParams permutation;
  PostulatesParams postulates;
  TomographyParams tomography;
};

/// Throws parse (with line and column) on malformed JSON and config (naming
/// the offending field) on schema violations.
RunConfig parse_config(std::string_view text);

/// Parses a bare policy object (the "policy" block of a run config).
dynamics::PolicyConfig parse_policy_config(std::string_view text);

/// Fully resolved configuration, defaults included. Feeding it back to
/// parse_config yields an identical RunConfig. output_dir is omitted: it
/// names where a run is written, not what is run.
nlohmann::json to_json(const RunConfig& config);

/// Seed precedence: `env_seed` (the PRECEDENCE_SEED value) if set, then the
/// configured seed, then a freshly generated one. Throws config on a
/// malformed environment value.
std::uint64_t resolve_seed(RunConfig& config, const char* env_seed);

}  // namespace precedence::config
