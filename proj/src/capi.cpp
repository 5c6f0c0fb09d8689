// SPDX-License-Identifier: Apache-2.0

#include "rhs/rhs.h"

#include "rhs/harness.hpp"

#include <fstream>
#include <iostream>
#include <new>
#include <string>

struct rhs_config {
  rhs::harness::SimConfig config;
};

struct rhs_sweep {
  rhs::harness::SweepResult result;
};

struct rhs_summary {
  rhs::harness::Summary summary;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;
thread_local std::size_t g_error_line = 0;

rhs_status fail(rhs_status status, std::string message) {
  g_error = std::move(message);
  g_error_key.clear();
  g_error_line = 0;
  return status;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn> rhs_status guarded(Fn &&fn) {
  try {
    g_error.clear();
    g_error_key.clear();
    g_error_line = 0;
    fn();
    return RHS_OK;
  } catch (const rhs::ParseError &e) {
    g_error = e.what();
    g_error_key = e.key();
    g_error_line = e.line();
    return RHS_ERR_PARSE;
  } catch (const rhs::DomainError &e) {
    return fail(RHS_ERR_DOMAIN, e.what());
  } catch (const rhs::NumericError &e) {
    return fail(RHS_ERR_NUMERIC, e.what());
  } catch (const std::ios_base::failure &e) {
    return fail(RHS_ERR_IO, e.what());
  } catch (const std::bad_alloc &) {
    return fail(RHS_ERR_INTERNAL, "out of memory");
  } catch (const std::runtime_error &e) {
    return fail(RHS_ERR_IO, e.what());
  } catch (const std::exception &e) {
    return fail(RHS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RHS_ERR_INTERNAL, "unknown error");
  }
}

template <class T> void write_to(const char *path, const T &writer) {
  const std::string p(path);
  if (p == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + p + "' for writing");
  writer(out);
  out.flush();
  if (!out)
    throw std::runtime_error("write to '" + p + "' failed");
}

} // namespace

extern "C" {

const char *rhs_version(void) { return "0.1.0"; }

const char *rhs_status_string(rhs_status status) {
  switch (status) {
  case RHS_OK:
    return "ok";
  case RHS_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case RHS_ERR_PARSE:
    return "parse error";
  case RHS_ERR_DOMAIN:
    return "domain error";
  case RHS_ERR_NUMERIC:
    return "numeric error";
  case RHS_ERR_IO:
    return "i/o error";
  case RHS_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

const char *rhs_last_error(void) { return g_error.c_str(); }
const char *rhs_last_error_key(void) { return g_error_key.c_str(); }
size_t rhs_last_error_line(void) { return g_error_line; }

rhs_status rhs_config_parse(const char *text, rhs_config **out) {
  if (!text || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = new rhs_config{rhs::harness::parse_config(text)}; });
}

rhs_status rhs_config_load(const char *path, rhs_config **out) {
  if (!path || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new rhs_config{rhs::harness::load_config(path)}; });
}

void rhs_config_free(rhs_config *config) { delete config; }

rhs_status rhs_config_set_seed(rhs_config *config, uint64_t seed) {
  if (!config)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_seed: null config");
  config->config.seed = seed;
  return RHS_OK;
}

rhs_status rhs_config_set_trials(rhs_config *config, size_t trials) {
  if (!config)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_trials: null config");
  if (trials == 0)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_trials: trials must be >= 1");
  config->config.trials = trials;
  return RHS_OK;
}

rhs_status rhs_config_set_threads(rhs_config *config, size_t threads) {
  if (!config)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_threads: null config");
  config->config.threads = threads == 0 ? 1 : threads;
  return RHS_OK;
}

rhs_status rhs_config_set_timing(rhs_config *config, int enabled) {
  if (!config)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_timing: null config");
  config->config.timing = enabled != 0;
  return RHS_OK;
}

rhs_status rhs_config_set_schemes(rhs_config *config, const char *schemes) {
  if (!config || !schemes)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_set_schemes: null argument");
  return guarded([&] {
    auto updated = config->config;
    updated.schemes = rhs::harness::parse_scheme_list(schemes);
    updated.validate();
    config->config = std::move(updated);
  });
}

rhs_status rhs_config_row_count(const rhs_config *config, size_t *out) {
  if (!config || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_config_row_count: null argument");
  const auto &c = config->config;
  *out = c.schemes.size() * c.p_max_dbm.size() * c.trials;
  return RHS_OK;
}

rhs_status rhs_sweep_run(const rhs_config *config, rhs_progress_fn progress, void *user,
                         rhs_sweep **out) {
  if (!config || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_sweep_run: null argument");
  *out = nullptr;
  return guarded([&] {
    rhs::harness::ProgressFn fn;
    if (progress)
      fn = [progress, user](std::size_t done, std::size_t total) { progress(done, total, user); };
    *out = new rhs_sweep{rhs::harness::run_sweep(config->config, fn)};
  });
}

size_t rhs_sweep_row_count(const rhs_sweep *sweep) { return sweep ? sweep->result.rows.size() : 0; }

size_t rhs_sweep_failure_count(const rhs_sweep *sweep) {
  if (!sweep)
    return 0;
  size_t n = 0;
  for (const auto &r : sweep->result.rows)
    n += r.failed() ? 1 : 0;
  return n;
}

rhs_status rhs_sweep_row(const rhs_sweep *sweep, size_t index, rhs_row *out) {
  if (!sweep || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_sweep_row: null argument");
  if (index >= sweep->result.rows.size())
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_sweep_row: index out of range");
  const auto &r = sweep->result.rows[index];
  *out = {r.scheme.c_str(), r.p_max_dbm, r.trial,      r.seed,          r.throughput,
          r.iterations,     r.converged, r.violations, r.wall_ms,       r.error.c_str()};
  return RHS_OK;
}

rhs_status rhs_sweep_write_csv(const rhs_sweep *sweep, const char *path) {
  if (!sweep || !path)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_sweep_write_csv: null argument");
  return guarded([&] {
    write_to(path, [&](std::ostream &os) { rhs::harness::write_csv(sweep->result, os); });
  });
}

rhs_status rhs_sweep_read_csv(const char *path, rhs_sweep **out) {
  if (!path || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_sweep_read_csv: null argument");
  *out = nullptr;
  return guarded([&] { *out = new rhs_sweep{rhs::harness::read_csv_file(path)}; });
}

void rhs_sweep_free(rhs_sweep *sweep) { delete sweep; }

rhs_status rhs_summary_compute(const rhs_sweep *sweep, rhs_summary **out) {
  if (!sweep || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_summary_compute: null argument");
  *out = nullptr;
  if (sweep->result.rows.empty())
    return fail(RHS_ERR_DOMAIN, "rhs_summary_compute: empty result");
  return guarded([&] { *out = new rhs_summary{rhs::harness::summarize(sweep->result)}; });
}

size_t rhs_summary_row_count(const rhs_summary *summary) {
  return summary ? summary->summary.rows.size() : 0;
}

rhs_status rhs_summary_row(const rhs_summary *summary, size_t index, rhs_summary_entry *out) {
  if (!summary || !out)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_summary_row: null argument");
  if (index >= summary->summary.rows.size())
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_summary_row: index out of range");
  const auto &r = summary->summary.rows[index];
  *out = {r.scheme.c_str(), r.p_max_dbm, r.count, r.failures, r.mean, r.stderr_mean};
  return RHS_OK;
}

size_t rhs_summary_warning_count(const rhs_summary *summary) {
  return summary ? summary->summary.warnings.size() : 0;
}

const char *rhs_summary_warning(const rhs_summary *summary, size_t index) {
  if (!summary || index >= summary->summary.warnings.size())
    return nullptr;
  return summary->summary.warnings[index].c_str();
}

rhs_status rhs_summary_write(const rhs_summary *summary, const char *path) {
  if (!summary || !path)
    return fail(RHS_ERR_INVALID_ARGUMENT, "rhs_summary_write: null argument");
  return guarded([&] {
    write_to(path, [&](std::ostream &os) { rhs::harness::write_summary(summary->summary, os); });
  });
}

void rhs_summary_free(rhs_summary *summary) { delete summary; }

} // extern "C"
