// SPDX-License-Identifier: Apache-2.0
//
// Simulation configuration, seeded Monte Carlo sweeps over the transmit power
// budget, and the CSV/summary formats for their results.
//
// Configuration syntax: '#' starts a comment, "[section]" opens a section and
// every other non-blank line is "key = value". Lists are comma separated; a
// "start:stop:step" range is accepted wherever a numeric list is; points are
// written "(x, y)" and point lists are ';' separated.
//
//   [dims]     S, K, M_x, M_y, N_tr                      (all required)
//   [layout]   ap, rhs, ue, ue_center, ue_radius, kappa
//   [channel]  rho_a, rho_b, sigma_delta, noise_dbm
//   [power]    p_max_dbm, p_thr_dbm ("off" disables), weights
//   [catalog]  <label> = <shape spec>, in catalog order
//   [run]      schemes, trials, seed, threads, timing
//   [solver]   tol_outer, max_outer, qp_tol, qp_max_iters, penalty_rounds,
//              penalty_initial, penalty_growth, eta, coupling,
//              per_surface_masks, diagnostic_sinr

#pragma once

#include "rhs/ao.hpp"
#include "rhs/baselines.hpp"
#include "rhs/channel.hpp"
#include "rhs/shapes.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace rhs::harness {

/// "adaptive", "fixed[:i]", "quantized-<b>bit[:i]", "zf_random[:i]"; i is the
/// catalog index of the fixed shape (default 0).
struct SchemeSpec {
  enum class Kind { adaptive, fixed, quantized, zf_random };

  std::string name;
  Kind kind = Kind::adaptive;
  std::size_t mask_index = 0;
  unsigned bits = 0;

  static SchemeSpec parse(std::string_view text);
};

struct CatalogEntry {
  std::string label;
  shapes::ShapeSpec spec;
};

struct SimConfig {
  channel::Dims dims;
  shapes::Grid grid;
  channel::NetworkLayout layout;
  channel::PathLossModel path_loss;
  double noise_dbm = -85.0;
  std::vector<double> p_max_dbm{30.0};
  std::optional<double> p_thr_dbm = 20.0;
  std::vector<double> weights; // empty: uniform
  std::vector<CatalogEntry> catalog;
  std::vector<SchemeSpec> schemes;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool timing = false;

  double tol_outer = 1e-4;
  std::size_t max_outer = 100;
  passive::SolverOptions passive{};
  double eta = 1.0;
  active::Coupling coupling = active::Coupling::per_user;
  bool per_surface_masks = false;
  bool diagnostic_sinr = false;

  /// Throws ParseError naming the offending key.
  void validate() const;

  shapes::ShapeCatalog build_catalog() const;
  ao::AOConfig ao_config(double p_max_dbm, std::uint64_t solver_seed) const;
};

/// Parses and validates a configuration document. Omitted fields keep their
/// defaults; [dims] is required.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string &path);

std::vector<SchemeSpec> parse_scheme_list(std::string_view text);
std::vector<SchemeSpec> default_schemes();

/// Stable splitmix64-based derivation. The trial seed depends only on the base
/// seed and the trial index, so every scheme and power point of a trial sees
/// the same network realization and the same starting phases.
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);
std::uint64_t channel_seed(std::uint64_t trial_seed);
std::uint64_t solver_seed(std::uint64_t trial_seed);

struct SweepRow {
  std::string scheme;
  double p_max_dbm = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double throughput = 0.0;
  long iterations = 0; // -1 marks a failed row
  bool converged = false;
  std::size_t violations = 0;
  double wall_ms = 0.0;
  std::string error; // not serialized

  bool failed() const { return iterations < 0; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// One row per (scheme, p_max, trial) in that nesting order. Sub-step errors
/// are recorded as failed rows and the sweep continues.
SweepResult run_sweep(const SimConfig &config, const ProgressFn &progress = {});

/// Runs one scheme on one channel realization.
ao::AOSolution run_scheme(const SchemeSpec &scheme, const channel::ChannelSet &channels,
                          const shapes::ShapeCatalog &catalog, const ao::AOConfig &config);

/// Network realization for one trial.
channel::ChannelSet build_trial_network(const SimConfig &config, std::uint64_t trial_seed);

inline constexpr std::string_view kCsvHeader =
    "scheme,p_max_dbm,trial,seed,throughput,iterations,converged,violations,wall_ms";

void write_csv(const SweepResult &result, std::ostream &out);
void write_csv(const SweepResult &result, const std::string &path);
SweepResult read_csv(std::istream &in);
SweepResult read_csv_file(const std::string &path);

struct SummaryRow {
  std::string scheme;
  double p_max_dbm = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows; // sorted by scheme, then p_max
  std::vector<std::string> warnings;
};

/// Per-(scheme, p_max) mean and standard error (sample deviation / sqrt(n))
/// over non-failed rows. Warns when a scheme's mean does not increase with
/// p_max.
Summary summarize(const SweepResult &result);
void write_summary(const Summary &summary, std::ostream &out);

/// "%.17g"
std::string format_double(double value);

} // namespace rhs::harness
