#pragma once

#include <filesystem>

#include "json.hpp"
#include "precedence/config.hpp"

namespace precedence::study {

/// Runs the configured study and writes into `output_dir` (created if
/// needed; every file is written to a temporary name and renamed):
///   config_echo.json  resolved config with seed; rerunning it reproduces the run
///   summary.json      scalar results, config echo and seed
///   series.csv        step,tv_distance,regime (stream studies) or a per-item table
///   ledger.jsonl      final ledger, unless the config names ledger_path
/// The config's seed must already be resolved. Returns the summary.
nlohmann::json run_study(const config::RunConfig& config, const std::filesystem::path& output_dir);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace precedence::study
