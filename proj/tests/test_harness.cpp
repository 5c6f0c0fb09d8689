// SPDX-License-Identifier: Apache-2.0

#include "rhs/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace rhs;
using namespace rhs::harness;

namespace {

const char *kSmall = R"(
# tiny sweep
[dims]
S = 2
K = 2
M_x = 2
M_y = 4
N_tr = 4

[power]
p_max_dbm = 30, 40
p_thr_dbm = off

[catalog]
block = rectangle(2,2)
row = strip_row(4)

[run]
schemes = adaptive, fixed:1, quantized-2bit, zf_random
trials = 3
seed = 42

[solver]
max_outer = 20
)";

std::string expect_parse_error(const std::string &text) {
  try {
    (void)parse_config(text);
  } catch (const ParseError &e) {
    return e.key();
  }
  FAIL("expected a parse error");
  return {};
}

std::string csv_of(const SweepResult &r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("parse_config requires dims") {
  CHECK(expect_parse_error("") == "dims");
  CHECK(expect_parse_error("[power]\np_max_dbm = 30\n") == "dims");
  CHECK(expect_parse_error("[dims]\nS = 1\nK = 1\nM_x = 10\nM_y = 60\n") == "dims.N_tr");
}

TEST_CASE("parse_config defaults") {
  const auto cfg = parse_config("[dims]\nS = 4\nK = 2\nM_x = 10\nM_y = 60\nN_tr = 32\n");
  CHECK(cfg.noise_dbm == -85.0);
  CHECK(cfg.path_loss.rho_a == 61.4);
  CHECK(cfg.path_loss.rho_b == 2.0);
  CHECK(cfg.path_loss.sigma_delta == 5.8);
  CHECK(cfg.p_max_dbm == std::vector<double>{30.0});
  REQUIRE(cfg.p_thr_dbm);
  CHECK(*cfg.p_thr_dbm == 20.0);
  CHECK(cfg.dims.elements == 600);
  CHECK(cfg.layout.rhs_positions.size() == 4);
  REQUIRE(cfg.catalog.size() == 2);
  const auto cat = cfg.build_catalog();
  CHECK(cat[0].active_count() == 60);
  CHECK(cat[1].active_count() == 60);
  CHECK(cfg.schemes.size() == 4);
  const auto ao = cfg.ao_config(30.0, 7);
  CHECK(ao.p_max == doctest::Approx(1.0));
  CHECK(ao.p_thr == doctest::Approx(0.1));
  CHECK(ao.seed == 7);
}

TEST_CASE("parse_config range syntax") {
  const auto cfg = parse_config(
      "[dims]\nS=1\nK=1\nM_x=10\nM_y=60\nN_tr=4\n[power]\np_max_dbm = 20:45:5\n");
  CHECK(cfg.p_max_dbm == std::vector<double>{20, 25, 30, 35, 40, 45});
}

TEST_CASE("parse_config errors name the key and line") {
  const std::string dims = "[dims]\nS=1\nK=1\nM_x=10\nM_y=60\nN_tr=4\n";
  CHECK(expect_parse_error(dims + "N_tr = 5\n") == "dims.N_tr");
  CHECK(expect_parse_error(dims + "[power]\np_max = 30\n") == "power.p_max");
  CHECK(expect_parse_error(dims + "[power]\np_max_dbm = thirty\n") == "power.p_max_dbm");
  CHECK(expect_parse_error(dims + "[run]\ntrials = 0\n") == "run.trials");
  CHECK(expect_parse_error(dims + "[run]\nschemes = adaptive, bogus\n") == "run.schemes");
  CHECK(expect_parse_error(dims + "[channel]\nnoise_dbm = inf\n") == "channel.noise_dbm");
  CHECK(expect_parse_error("[dims]\nS=1\nK=1\nM_x=4\nM_y=4\nN_tr=4\n") == "catalog");
  try {
    (void)parse_config(dims + "[power]\np_max_dbm = 30\np_max_dbm = 40\n");
    FAIL("duplicate accepted");
  } catch (const ParseError &e) {
    CHECK(e.key() == "power.p_max_dbm");
    CHECK(e.line() == 9);
  }
}

TEST_CASE("scheme names") {
  CHECK(SchemeSpec::parse("adaptive").kind == SchemeSpec::Kind::adaptive);
  const auto f = SchemeSpec::parse("fixed:1");
  CHECK(f.kind == SchemeSpec::Kind::fixed);
  CHECK(f.mask_index == 1);
  const auto q = SchemeSpec::parse("quantized-3bit");
  CHECK(q.kind == SchemeSpec::Kind::quantized);
  CHECK(q.bits == 3);
  CHECK(SchemeSpec::parse("zf_random").kind == SchemeSpec::Kind::zf_random);
  CHECK_THROWS_AS(SchemeSpec::parse("quantized-0bit"), ParseError);
  CHECK_THROWS_AS(SchemeSpec::parse("adaptive:1"), ParseError);
  CHECK_THROWS_AS(parse_scheme_list("fixed, fixed"), ParseError);
}

TEST_CASE("seed derivation") {
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(channel_seed(5) != solver_seed(5));
}

TEST_CASE("run_sweep cardinality and order") {
  auto cfg = parse_config(kSmall);
  const auto result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 4 * 2 * 3);
  std::size_t i = 0;
  for (const auto &s : cfg.schemes)
    for (double p : cfg.p_max_dbm)
      for (std::size_t t = 0; t < 3; ++t, ++i) {
        CHECK(result.rows[i].scheme == s.name);
        CHECK(result.rows[i].p_max_dbm == p);
        CHECK(result.rows[i].trial == t);
        CHECK(result.rows[i].seed == trial_seed(42, t));
        CHECK_FALSE(result.rows[i].failed());
        CHECK(std::isfinite(result.rows[i].throughput));
        CHECK(result.rows[i].wall_ms == 0.0);
      }

  cfg.trials = 1;
  cfg.schemes = parse_scheme_list("fixed");
  cfg.p_max_dbm = {30.0};
  CHECK(run_sweep(cfg).rows.size() == 1);
}

TEST_CASE("run_sweep is deterministic across thread counts") {
  auto cfg = parse_config(kSmall);
  const auto a = csv_of(run_sweep(cfg));
  const auto b = csv_of(run_sweep(cfg));
  cfg.threads = 3;
  const auto c = csv_of(run_sweep(cfg));
  CHECK(a == b);
  CHECK(a == c);
  cfg.seed = 43;
  CHECK(csv_of(run_sweep(cfg)) != a);
}

TEST_CASE("rows share one network per trial") {
  const auto cfg = parse_config(kSmall);
  const auto n0 = build_trial_network(cfg, trial_seed(cfg.seed, 0));
  const auto n1 = build_trial_network(cfg, trial_seed(cfg.seed, 0));
  CHECK(n0.h_ap_rhs[0] == n1.h_ap_rhs[0]);
  CHECK(n0.ue_positions == n1.ue_positions);
}

TEST_CASE("sub-step failures become failed rows") {
  auto cfg = parse_config(kSmall);
  // Two users on one surface with a single active element: rank-one channels.
  cfg.catalog = {{"dot", shapes::ShapeSpec::parse("rectangle(1,1)")}};
  cfg.schemes = parse_scheme_list("zf_random");
  cfg.dims.surfaces = 1;
  cfg.layout.rhs_positions = {{10.0, 10.0}};
  cfg.trials = 2;
  const auto result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 4);
  for (const auto &r : result.rows) {
    CHECK(r.failed());
    CHECK(std::isnan(r.throughput));
    CHECK_FALSE(r.error.empty());
  }
  const auto text = csv_of(result);
  CHECK(text.find(",nan,-1,0,") != std::string::npos);
}

TEST_CASE("CSV round trip") {
  SweepResult r;
  SweepRow row;
  row.scheme = "adaptive";
  row.p_max_dbm = 27.5;
  row.trial = 3;
  row.seed = 18446744073709551615ULL;
  row.throughput = 1.0 / 3.0;
  row.iterations = 12;
  row.converged = true;
  row.violations = 2;
  row.wall_ms = 0.125;
  r.rows.push_back(row);
  SweepRow failed = row;
  failed.throughput = std::nan("");
  failed.iterations = -1;
  failed.converged = false;
  r.rows.push_back(failed);

  const auto text = csv_of(r);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].scheme == row.scheme);
  CHECK(back.rows[0].p_max_dbm == row.p_max_dbm);
  CHECK(back.rows[0].trial == row.trial);
  CHECK(back.rows[0].seed == row.seed);
  CHECK(back.rows[0].throughput == row.throughput);
  CHECK(back.rows[0].iterations == row.iterations);
  CHECK(back.rows[0].converged == row.converged);
  CHECK(back.rows[0].violations == row.violations);
  CHECK(back.rows[0].wall_ms == row.wall_ms);
  CHECK(back.rows[1].failed());
  CHECK(std::isnan(back.rows[1].throughput));
  CHECK(csv_of(back) == text);

  std::istringstream bad("scheme,p\n");
  CHECK_THROWS_AS(read_csv(bad), ParseError);
  std::istringstream short_row(std::string(kCsvHeader) + "\nadaptive,30,0\n");
  CHECK_THROWS_AS(read_csv(short_row), ParseError);
  CHECK_THROWS_AS(write_csv(r, std::string("/nonexistent-dir/out.csv")), std::runtime_error);
}

TEST_CASE("summarize") {
  SweepResult r;
  auto add = [&](const std::string &s, double p, double v, long it = 1) {
    SweepRow row;
    row.scheme = s;
    row.p_max_dbm = p;
    row.throughput = v;
    row.iterations = it;
    r.rows.push_back(row);
  };
  add("b", 30, 4.0);
  add("b", 30, 6.0);
  add("a", 30, 2.5);
  add("a", 30, 2.5);
  add("a", 20, 3.0);
  add("a", 20, std::nan(""), -1);
  const auto s = summarize(r);
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[0].scheme == "a");
  CHECK(s.rows[0].p_max_dbm == 20.0);
  CHECK(s.rows[0].count == 1);
  CHECK(s.rows[0].failures == 1);
  CHECK(s.rows[1].mean == 2.5);
  CHECK(s.rows[1].stderr_mean == 0.0);
  CHECK(s.rows[2].scheme == "b");
  CHECK(s.rows[2].mean == doctest::Approx(5.0));
  CHECK(s.rows[2].stderr_mean == doctest::Approx(1.0));
  // a: 3.0 at 20 dBm, 2.5 at 30 dBm
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("'a'") != std::string::npos);

  std::ostringstream out;
  write_summary(s, out);
  CHECK(out.str().rfind("scheme,p_max_dbm,count,failures,mean,stderr\n", 0) == 0);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(30.0) == "30");
  CHECK(format_double(std::nan("")) == "nan");
  for (double x : {1.0 / 3.0, 6.02214076e23, -1e-300, 123456.789})
    CHECK(std::stod(format_double(x)) == x);
}

} // TEST_SUITE
