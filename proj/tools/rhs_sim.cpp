// SPDX-License-Identifier: Apache-2.0
//
// rhs_sim: run Monte Carlo power sweeps and summarize their CSV output.

#include "rhs/rhs.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

namespace {

int report(rhs_status status, const char *what) {
  std::fprintf(stderr, "rhs_sim: %s: %s: %s\n", what, rhs_status_string(status), rhs_last_error());
  return status == RHS_ERR_PARSE || status == RHS_ERR_INVALID_ARGUMENT ? 2 : 1;
}

void print_progress(size_t done, size_t total, void *) {
  std::fprintf(stderr, "\rtrial %zu/%zu", done, total);
  if (done == total)
    std::fputc('\n', stderr);
  std::fflush(stderr);
}

struct ConfigDeleter {
  void operator()(rhs_config *c) const { rhs_config_free(c); }
};
struct SweepDeleter {
  void operator()(rhs_sweep *s) const { rhs_sweep_free(s); }
};
struct SummaryDeleter {
  void operator()(rhs_summary *s) const { rhs_summary_free(s); }
};

struct RunOptions {
  std::string config;
  std::string out = "-";
  std::optional<uint64_t> seed;
  std::optional<std::string> schemes;
  std::optional<size_t> trials;
  std::optional<size_t> threads;
  bool quiet = false;
  bool timing = false;
};

int run(const RunOptions &opt) {
  rhs_config *raw = nullptr;
  if (auto st = rhs_config_load(opt.config.c_str(), &raw); st != RHS_OK)
    return report(st, "config");
  std::unique_ptr<rhs_config, ConfigDeleter> config(raw);

  rhs_status st = RHS_OK;
  if (opt.seed && (st = rhs_config_set_seed(config.get(), *opt.seed)) != RHS_OK)
    return report(st, "--seed");
  if (opt.trials && (st = rhs_config_set_trials(config.get(), *opt.trials)) != RHS_OK)
    return report(st, "--trials");
  if (opt.threads && (st = rhs_config_set_threads(config.get(), *opt.threads)) != RHS_OK)
    return report(st, "--threads");
  if (opt.schemes && (st = rhs_config_set_schemes(config.get(), opt.schemes->c_str())) != RHS_OK)
    return report(st, "--schemes");
  if (opt.timing && (st = rhs_config_set_timing(config.get(), 1)) != RHS_OK)
    return report(st, "--timing");

  rhs_sweep *sweep_raw = nullptr;
  st = rhs_sweep_run(config.get(), opt.quiet ? nullptr : print_progress, nullptr, &sweep_raw);
  if (st != RHS_OK)
    return report(st, "sweep");
  std::unique_ptr<rhs_sweep, SweepDeleter> sweep(sweep_raw);

  if ((st = rhs_sweep_write_csv(sweep.get(), opt.out.c_str())) != RHS_OK)
    return report(st, "write");

  const size_t failures = rhs_sweep_failure_count(sweep.get());
  if (failures > 0 && !opt.quiet) {
    std::fprintf(stderr, "rhs_sim: %zu of %zu rows failed\n", failures,
                 rhs_sweep_row_count(sweep.get()));
    rhs_row row;
    for (size_t i = 0; i < rhs_sweep_row_count(sweep.get()); ++i)
      if (rhs_sweep_row(sweep.get(), i, &row) == RHS_OK && row.iterations < 0) {
        std::fprintf(stderr, "  first failure (%s, %g dBm, trial %zu): %s\n", row.scheme,
                     row.p_max_dbm, row.trial, row.error);
        break;
      }
  }
  return 0;
}

int summarize(const std::string &in) {
  rhs_sweep *raw = nullptr;
  if (auto st = rhs_sweep_read_csv(in.c_str(), &raw); st != RHS_OK)
    return report(st, "read");
  std::unique_ptr<rhs_sweep, SweepDeleter> sweep(raw);

  rhs_summary *sum_raw = nullptr;
  if (auto st = rhs_summary_compute(sweep.get(), &sum_raw); st != RHS_OK)
    return report(st, "summarize");
  std::unique_ptr<rhs_summary, SummaryDeleter> summary(sum_raw);

  if (auto st = rhs_summary_write(summary.get(), "-"); st != RHS_OK)
    return report(st, "write");
  for (size_t i = 0; i < rhs_summary_warning_count(summary.get()); ++i)
    std::fprintf(stderr, "warning: %s\n", rhs_summary_warning(summary.get(), i));
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Throughput sweeps for shape-adaptive multi-surface downlinks"};
  app.set_version_flag("--version", std::string(rhs_version()));
  app.require_subcommand(1);

  RunOptions run_opt;
  auto *run_cmd = app.add_subcommand("run", "Run a p_max sweep and write CSV rows");
  run_cmd->add_option("--config", run_opt.config, "Configuration file")->required();
  run_cmd->add_option("--out", run_opt.out, "Output CSV path ('-' for stdout)")
      ->capture_default_str();
  run_cmd->add_option("--seed", run_opt.seed, "Base seed (overrides the config)");
  run_cmd->add_option("--schemes", run_opt.schemes,
                      "Comma separated schemes: adaptive, fixed[:i], quantized-<b>bit[:i], "
                      "zf_random[:i]");
  run_cmd->add_option("--trials", run_opt.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", run_opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", run_opt.quiet, "No progress output");
  run_cmd->add_flag("--timing", run_opt.timing, "Record wall-clock time per row");

  std::string summary_in;
  auto *sum_cmd = app.add_subcommand("summarize", "Per-scheme mean and standard error");
  sum_cmd->add_option("--in", summary_in, "CSV written by 'run'")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed())
    return run(run_opt);
  return summarize(summary_in);
}
