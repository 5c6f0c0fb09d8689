// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library through its C header only.

#include "rhs/rhs.h"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const char *kConfig = R"([dims]
S = 1
K = 2
M_x = 2
M_y = 2
N_tr = 3

[power]
p_max_dbm = 30, 35

[catalog]
full = rectangle(2,2)
half = strip_row(2)

[run]
schemes = adaptive, zf_random
trials = 2
seed = 9
)";

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string temp_path(const char *name) {
  return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/rhs_capi_" + name;
}

} // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status strings") {
  CHECK(std::string(rhs_version()).size() > 0);
  CHECK(std::string(rhs_status_string(RHS_OK)) == "ok");
  CHECK(std::string(rhs_status_string(RHS_ERR_PARSE)) == "parse error");
}

TEST_CASE("config parse errors carry key and line") {
  rhs_config *cfg = nullptr;
  CHECK(rhs_config_parse("", &cfg) == RHS_ERR_PARSE);
  CHECK(cfg == nullptr);
  CHECK(std::string(rhs_last_error_key()) == "dims");
  CHECK(std::string(rhs_last_error()).find("dims") != std::string::npos);

  CHECK(rhs_config_parse("[dims]\nS=1\nS=2\n", &cfg) == RHS_ERR_PARSE);
  CHECK(std::string(rhs_last_error_key()) == "dims.S");
  CHECK(rhs_last_error_line() == 3);

  CHECK(rhs_config_parse(nullptr, &cfg) == RHS_ERR_INVALID_ARGUMENT);
  CHECK(rhs_config_load("/nonexistent/file.ini", &cfg) == RHS_ERR_IO);
}

TEST_CASE("sweep through the C interface") {
  rhs_config *cfg = nullptr;
  REQUIRE(rhs_config_parse(kConfig, &cfg) == RHS_OK);
  size_t expected = 0;
  REQUIRE(rhs_config_row_count(cfg, &expected) == RHS_OK);
  CHECK(expected == 2 * 2 * 2);

  CHECK(rhs_config_set_schemes(cfg, "adaptive,bogus") == RHS_ERR_PARSE);
  CHECK(rhs_config_set_schemes(cfg, "fixed:5") == RHS_ERR_PARSE);
  CHECK(rhs_config_set_trials(cfg, 0) == RHS_ERR_INVALID_ARGUMENT);
  REQUIRE(rhs_config_set_schemes(cfg, "adaptive,fixed:1,zf_random") == RHS_OK);
  REQUIRE(rhs_config_set_trials(cfg, 3) == RHS_OK);
  REQUIRE(rhs_config_row_count(cfg, &expected) == RHS_OK);
  CHECK(expected == 3 * 2 * 3);

  size_t calls = 0;
  auto progress = [](size_t done, size_t total, void *user) {
    auto *n = static_cast<size_t *>(user);
    ++*n;
    CHECK(done <= total);
  };
  rhs_sweep *sweep = nullptr;
  REQUIRE(rhs_sweep_run(cfg, progress, &calls, &sweep) == RHS_OK);
  CHECK(calls == 3);
  REQUIRE(rhs_sweep_row_count(sweep) == expected);
  CHECK(rhs_sweep_failure_count(sweep) == 0);

  rhs_row row;
  REQUIRE(rhs_sweep_row(sweep, 0, &row) == RHS_OK);
  CHECK(std::string(row.scheme) == "adaptive");
  CHECK(row.p_max_dbm == 30.0);
  CHECK(row.trial == 0);
  CHECK(std::isfinite(row.throughput));
  CHECK(row.throughput > 0.0);
  CHECK(row.iterations >= 1);
  CHECK(std::string(row.error).empty());
  CHECK(rhs_sweep_row(sweep, expected, &row) == RHS_ERR_INVALID_ARGUMENT);

  const auto a = temp_path("a.csv"), b = temp_path("b.csv");
  REQUIRE(rhs_sweep_write_csv(sweep, a.c_str()) == RHS_OK);
  rhs_sweep *again = nullptr;
  REQUIRE(rhs_sweep_run(cfg, nullptr, nullptr, &again) == RHS_OK);
  REQUIRE(rhs_sweep_write_csv(again, b.c_str()) == RHS_OK);
  CHECK(slurp(a) == slurp(b));
  CHECK(rhs_sweep_write_csv(sweep, "/nonexistent/x.csv") == RHS_ERR_IO);

  rhs_sweep *read = nullptr;
  REQUIRE(rhs_sweep_read_csv(a.c_str(), &read) == RHS_OK);
  CHECK(rhs_sweep_row_count(read) == expected);

  rhs_summary *sum = nullptr;
  REQUIRE(rhs_summary_compute(read, &sum) == RHS_OK);
  CHECK(rhs_summary_row_count(sum) == 3 * 2);
  rhs_summary_entry entry;
  REQUIRE(rhs_summary_row(sum, 0, &entry) == RHS_OK);
  CHECK(std::string(entry.scheme) == "adaptive");
  CHECK(entry.count == 3);
  CHECK(entry.failures == 0);
  CHECK(entry.stderr_mean >= 0.0);
  CHECK(rhs_summary_row(sum, 99, &entry) == RHS_ERR_INVALID_ARGUMENT);
  CHECK(rhs_summary_warning(sum, 99) == nullptr);
  CHECK(rhs_summary_write(sum, temp_path("summary.csv").c_str()) == RHS_OK);
  CHECK(slurp(temp_path("summary.csv")).rfind("scheme,p_max_dbm,count,failures,mean,stderr\n", 0) == 0);

  rhs_summary_free(sum);
  rhs_sweep_free(read);
  rhs_sweep_free(again);
  rhs_sweep_free(sweep);
  rhs_config_free(cfg);
  std::remove(a.c_str());
  std::remove(b.c_str());
  std::remove(temp_path("summary.csv").c_str());
}

TEST_CASE("null handles") {
  CHECK(rhs_sweep_row_count(nullptr) == 0);
  CHECK(rhs_summary_row_count(nullptr) == 0);
  CHECK(rhs_config_set_seed(nullptr, 1) == RHS_ERR_INVALID_ARGUMENT);
  CHECK(rhs_sweep_run(nullptr, nullptr, nullptr, nullptr) == RHS_ERR_INVALID_ARGUMENT);
  CHECK(rhs_summary_compute(nullptr, nullptr) == RHS_ERR_INVALID_ARGUMENT);
  rhs_config_free(nullptr);
  rhs_sweep_free(nullptr);
  rhs_summary_free(nullptr);
}

TEST_CASE("unreadable CSV") {
  rhs_sweep *s = nullptr;
  CHECK(rhs_sweep_read_csv("/nonexistent/in.csv", &s) == RHS_ERR_IO);
  const auto bad = temp_path("bad.csv");
  {
    std::ofstream out(bad);
    out << "not,a,header\n";
  }
  CHECK(rhs_sweep_read_csv(bad.c_str(), &s) == RHS_ERR_PARSE);
  CHECK(s == nullptr);
  std::remove(bad.c_str());
}

} // TEST_SUITE
