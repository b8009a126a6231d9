#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "precedence/precedence.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  prec_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(prec_version()) > 0);
  CHECK(std::string(prec_status_name(PREC_OK)) == "ok");
  CHECK(std::string(prec_status_name(PREC_ERR_IO)) == "i/o error");
}

TEST_CASE("ledger handles") {
  prec_ledger* l = nullptr;
  REQUIRE(prec_ledger_create(&l) == PREC_OK);
  uint64_t size = 99;
  CHECK(prec_ledger_size(l, &size) == PREC_OK);
  CHECK(size == 0);

  prec_engine* e = nullptr;
  REQUIRE(prec_engine_create(R"({"threshold_T": 1, "buildup": "urn"})", 7, l, &e) == PREC_OK);
  const double re[2] = {1.0, 1.0};
  int32_t first = -1;
  prec_regime regime = PREC_REGIME_PRECEDENCE;
  REQUIRE(prec_engine_measure_pure(e, re, nullptr, 2, &first, &regime) == PREC_OK);
  CHECK(regime == PREC_REGIME_FREEDOM);
  for (int i = 0; i < 100; ++i) {
    int32_t o = -1;
    REQUIRE(prec_engine_measure_pure(e, re, nullptr, 2, &o, &regime) == PREC_OK);
    CHECK(o == first);
    CHECK(regime == PREC_REGIME_PRECEDENCE);
  }
  prec_engine_destroy(e);
  CHECK(prec_ledger_size(l, &size) == PREC_OK);
  CHECK(size == 101);

  const auto path = (std::filesystem::temp_directory_path() / "precedence_c_api.jsonl").string();
  REQUIRE(prec_ledger_save(l, path.c_str()) == PREC_OK);
  prec_ledger_destroy(l);

  prec_ledger* back = nullptr;
  REQUIRE(prec_ledger_load(path.c_str(), &back) == PREC_OK);
  CHECK(prec_ledger_size(back, &size) == PREC_OK);
  CHECK(size == 101);
  char* text = nullptr;
  REQUIRE(prec_ledger_inspect(back, nullptr, &text) == PREC_OK);
  CHECK(take(text).find("count: 101") != std::string::npos);
  prec_ledger_destroy(back);
}

TEST_CASE("errors carry codes and messages") {
  prec_ledger* l = nullptr;
  CHECK(prec_ledger_load("/nonexistent/dir/ledger.jsonl", &l) == PREC_ERR_IO);
  CHECK(l == nullptr);
  CHECK(std::string(prec_last_error()).find("ledger") != std::string::npos);
  CHECK(prec_ledger_create(nullptr) == PREC_ERR_INVALID_ARGUMENT);

  REQUIRE(prec_ledger_create(&l) == PREC_OK);
  prec_engine* e = nullptr;
  CHECK(prec_engine_create(R"({"thresholdT": 3})", 1, l, &e) == PREC_ERR_CONFIG);
  CHECK(std::string(prec_last_error()).find("thresholdT") != std::string::npos);
  CHECK(prec_engine_create("{not json", 1, l, &e) == PREC_ERR_PARSE);
  REQUIRE(prec_engine_create("{}", 1, l, &e) == PREC_OK);
  const double zero[2] = {0.0, 0.0};
  int32_t o = 0;
  CHECK(prec_engine_measure_pure(e, zero, nullptr, 2, &o, nullptr) == PREC_ERR_INVALID_STATE);
  prec_engine_destroy(e);
  prec_ledger_destroy(l);

  char* out = nullptr;
  CHECK(prec_run_config(R"({"study": "nope"})", nullptr, nullptr, &out) == PREC_ERR_CONFIG);
  CHECK(out == nullptr);
}

TEST_CASE("postulate report and runs") {
  char* json = nullptr;
  REQUIRE(prec_postulate_report(3, &json) == PREC_OK);
  CHECK(take(json).find("\"quantum\": 8") != std::string::npos);

  const auto dir = (std::filesystem::temp_directory_path() / "precedence_c_api_run").string();
  std::filesystem::remove_all(dir);
  char* summary = nullptr;
  REQUIRE(prec_run_config(R"({"study": "lock_in", "seed": 3, "policy": {"threshold_T": 1, "buildup": "urn"},
                              "lock_in": {"n_runs": 100, "run_length": 50}})",
                          dir.c_str(), "11", &summary) == PREC_OK);
  const std::string s = take(summary);
  CHECK(s.find("\"seed\": 11") != std::string::npos);
  CHECK(s.find("\"locked_runs\": 100") != std::string::npos);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "config_echo.json"));
}
