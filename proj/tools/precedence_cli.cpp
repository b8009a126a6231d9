// Command-line front end over the C API.
//
//   precedence run --config <file> [--out <dir>]
//   precedence ledger inspect <path> [--key PREP:MEAS]
//   precedence postulates [--max-n N]
//   precedence version
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "precedence/precedence.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int report(prec_status status) {
  std::cerr << "precedence: " << prec_status_name(status) << ": " << prec_last_error() << "\n";
  return kExitFailure;
}

void print_and_free(char* text) {
  std::cout << text << "\n";
  prec_string_free(text);
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "precedence: cannot read config file '" << config_path << "': file not found or unreadable\n";
    return kExitFailure;
  }
  std::ostringstream text;
  text << in.rdbuf();
  char* summary = nullptr;
  const prec_status s = prec_run_config(text.str().c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                        std::getenv("PRECEDENCE_SEED"), &summary);
  if (s != PREC_OK) return report(s);
  print_and_free(summary);
  return 0;
}

int cmd_inspect(const std::string& path, const std::string& key) {
  prec_ledger* ledger = nullptr;
  prec_status s = prec_ledger_load(path.c_str(), &ledger);
  if (s == PREC_ERR_IO) {
    std::cerr << "precedence: ledger file not found or unreadable: " << prec_last_error() << "\n";
    return kExitFailure;
  }
  if (s != PREC_OK) return report(s);
  char* text = nullptr;
  s = prec_ledger_inspect(ledger, key.empty() ? nullptr : key.c_str(), &text);
  prec_ledger_destroy(ledger);
  if (s != PREC_OK) return report(s);
  std::cout << text;
  prec_string_free(text);
  return 0;
}

int cmd_postulates(unsigned max_n) {
  char* json = nullptr;
  const prec_status s = prec_postulate_report(max_n, &json);
  if (s != PREC_OK) return report(s);
  print_and_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Precedence measurement dynamics and quantum freedom-count checks", "precedence"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run the study described by a JSON config");
  run->add_option("--config", config_path, "Run config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::string ledger_path;
  std::string key;
  auto* ledger = app.add_subcommand("ledger", "Ledger utilities");
  ledger->require_subcommand(1);
  auto* inspect = ledger->add_subcommand("inspect", "Print stream counts and sequence heads/tails");
  inspect->add_option("path", ledger_path, "Ledger file (JSONL)")->required();
  inspect->add_option("--key", key, "Restrict to one stream, PREP:MEAS");

  unsigned max_n = 5;
  auto* postulates = app.add_subcommand("postulates", "Freedom-count report for capacities 2..N");
  postulates->add_option("--max-n", max_n, "Largest capacity")->check(CLI::Range(2u, 8u));

  app.add_subcommand("version", "Print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() != 0) std::cerr << "\n" << app.help();
    return kExitUsage;
  }

  if (run->parsed()) return cmd_run(config_path, out_dir);
  if (inspect->parsed()) return cmd_inspect(ledger_path, key);
  if (postulates->parsed()) return cmd_postulates(max_n);
  std::cout << prec_version() << "\n";
  return 0;
}
