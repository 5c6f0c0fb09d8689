// SPDX-License-Identifier: Apache-2.0

#include "rhs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace rhs::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kChannelSalt = 0x6368616e6e656cULL; // "channel"
constexpr std::uint64_t kSolverSalt = 0x736f6c766572ULL;    // "solver"

baselines::BaselineKind to_baseline(const SchemeSpec &scheme) {
  switch (scheme.kind) {
  case SchemeSpec::Kind::fixed:
    return baselines::FixedShape{scheme.mask_index};
  case SchemeSpec::Kind::quantized:
    return baselines::Quantized{scheme.bits, scheme.mask_index};
  case SchemeSpec::Kind::zf_random:
    return baselines::ZfRandom{scheme.mask_index};
  case SchemeSpec::Kind::adaptive:
    break;
  }
  throw DomainError("to_baseline: adaptive is not a baseline");
}

// All rows of one trial, in (scheme, p_max) order.
std::vector<SweepRow> run_trial(const SimConfig &config, const shapes::ShapeCatalog &catalog,
                                std::size_t trial) {
  const std::uint64_t seed = trial_seed(config.seed, trial);
  std::vector<SweepRow> rows;
  rows.reserve(config.schemes.size() * config.p_max_dbm.size());

  std::optional<channel::ChannelSet> channels;
  std::string network_error;
  try {
    channels = build_trial_network(config, seed);
  } catch (const std::exception &e) {
    network_error = std::string("network: ") + e.what();
  }

  for (const auto &scheme : config.schemes)
    for (double p : config.p_max_dbm) {
      SweepRow row;
      row.scheme = scheme.name;
      row.p_max_dbm = p;
      row.trial = trial;
      row.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (!channels)
          throw NumericError(network_error);
        const auto sol = run_scheme(scheme, *channels, catalog, config.ao_config(p, solver_seed(seed)));
        row.throughput = sol.objective();
        row.iterations = static_cast<long>(sol.iterations);
        row.converged = sol.converged;
        row.violations = sol.violations;
        if (!std::isfinite(row.throughput))
          throw NumericError("non-finite throughput");
      } catch (const std::exception &e) {
        row.throughput = std::numeric_limits<double>::quiet_NaN();
        row.iterations = -1;
        row.converged = false;
        row.violations = 0;
        row.error = e.what();
      }
      if (config.timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
      rows.push_back(std::move(row));
    }
  return rows;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ','))
    out.push_back(field);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

double parse_csv_double(const std::string &text, std::size_t line) {
  if (text == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ParseError("csv", line, "bad number '" + text + "'");
  return v;
}

long long parse_csv_int(const std::string &text, std::size_t line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ParseError("csv", line, "bad integer '" + text + "'");
  return v;
}

} // namespace

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  return splitmix64(splitmix64(base) ^ static_cast<std::uint64_t>(trial));
}

std::uint64_t channel_seed(std::uint64_t trial_seed) { return splitmix64(trial_seed ^ kChannelSalt); }

std::uint64_t solver_seed(std::uint64_t trial_seed) { return splitmix64(trial_seed ^ kSolverSalt); }

channel::ChannelSet build_trial_network(const SimConfig &config, std::uint64_t seed) {
  channel::Rng rng(channel_seed(seed));
  return channel::build_network(config.layout, config.path_loss, config.dims, config.noise_dbm, rng);
}

ao::AOSolution run_scheme(const SchemeSpec &scheme, const channel::ChannelSet &channels,
                          const shapes::ShapeCatalog &catalog, const ao::AOConfig &config) {
  if (scheme.kind == SchemeSpec::Kind::adaptive)
    return ao::solve(channels, catalog, config);
  return baselines::run_baseline(to_baseline(scheme), channels, catalog, config);
}

SweepResult run_sweep(const SimConfig &config, const ProgressFn &progress) {
  config.validate();
  const auto catalog = config.build_catalog();
  const std::size_t trials = config.trials;
  std::vector<std::vector<SweepRow>> per_trial(trials);

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      per_trial[t] = run_trial(config, catalog, t);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(++done, trials);
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(config.threads, 1, trials);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }

  // Reorder from trial-major to (scheme, p_max, trial).
  SweepResult result;
  const std::size_t points = config.p_max_dbm.size();
  result.rows.reserve(trials * config.schemes.size() * points);
  for (std::size_t s = 0; s < config.schemes.size(); ++s)
    for (std::size_t p = 0; p < points; ++p)
      for (std::size_t t = 0; t < trials; ++t)
        result.rows.push_back(per_trial[t][s * points + p]);
  return result;
}

std::string format_double(double value) {
  if (std::isnan(value))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const SweepResult &result, std::ostream &out) {
  out << kCsvHeader << '\n';
  for (const auto &r : result.rows)
    out << r.scheme << ',' << format_double(r.p_max_dbm) << ',' << r.trial << ',' << r.seed << ','
        << format_double(r.throughput) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << r.violations << ',' << format_double(r.wall_ms) << '\n';
}

void write_csv(const SweepResult &result, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(result, out);
  if (!out)
    throw std::runtime_error("write to '" + path + "' failed");
}

SweepResult read_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ParseError("csv", 1, "missing or unexpected header");
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9)
      throw ParseError("csv", line_no, "expected 9 fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.scheme = f[0];
    r.p_max_dbm = parse_csv_double(f[1], line_no);
    const auto trial = parse_csv_int(f[2], line_no);
    if (trial < 0)
      throw ParseError("csv", line_no, "negative trial index");
    r.trial = static_cast<std::size_t>(trial);
    try {
      std::size_t used = 0;
      r.seed = std::stoull(f[3], &used);
      if (used != f[3].size())
        throw std::invalid_argument("seed");
    } catch (const std::exception &) {
      throw ParseError("csv", line_no, "bad seed '" + f[3] + "'");
    }
    r.throughput = parse_csv_double(f[4], line_no);
    r.iterations = static_cast<long>(parse_csv_int(f[5], line_no));
    r.converged = parse_csv_int(f[6], line_no) != 0;
    const auto viol = parse_csv_int(f[7], line_no);
    if (viol < 0)
      throw ParseError("csv", line_no, "negative violation count");
    r.violations = static_cast<std::size_t>(viol);
    r.wall_ms = parse_csv_double(f[8], line_no);
    result.rows.push_back(std::move(r));
  }
  return result;
}

SweepResult read_csv_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

Summary summarize(const SweepResult &result) {
  struct Acc {
    std::vector<double> values;
    std::size_t failures = 0;
  };
  std::map<std::pair<std::string, double>, Acc> groups;
  for (const auto &r : result.rows) {
    auto &acc = groups[{r.scheme, r.p_max_dbm}];
    if (r.failed() || !std::isfinite(r.throughput))
      ++acc.failures;
    else
      acc.values.push_back(r.throughput);
  }

  Summary summary;
  for (const auto &[key, acc] : groups) {
    SummaryRow row;
    row.scheme = key.first;
    row.p_max_dbm = key.second;
    row.count = acc.values.size();
    row.failures = acc.failures;
    if (row.count == 0) {
      row.mean = std::numeric_limits<double>::quiet_NaN();
      row.stderr_mean = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : acc.values)
        sum += v;
      row.mean = sum / static_cast<double>(row.count);
      double ss = 0.0;
      for (double v : acc.values)
        ss += (v - row.mean) * (v - row.mean);
      row.stderr_mean = row.count > 1 ? std::sqrt(ss / static_cast<double>(row.count - 1)) /
                                            std::sqrt(static_cast<double>(row.count))
                                      : 0.0;
    }
    summary.rows.push_back(std::move(row));
  }

  for (std::size_t i = 1; i < summary.rows.size(); ++i) {
    const auto &a = summary.rows[i - 1];
    const auto &b = summary.rows[i];
    if (a.scheme == b.scheme && std::isfinite(a.mean) && std::isfinite(b.mean) && !(b.mean > a.mean))
      summary.warnings.push_back("scheme '" + b.scheme + "': mean throughput does not increase from " +
                                 format_double(a.p_max_dbm) + " dBm to " +
                                 format_double(b.p_max_dbm) + " dBm");
  }
  return summary;
}

void write_summary(const Summary &summary, std::ostream &out) {
  out << "scheme,p_max_dbm,count,failures,mean,stderr\n";
  for (const auto &r : summary.rows)
    out << r.scheme << ',' << format_double(r.p_max_dbm) << ',' << r.count << ',' << r.failures << ','
        << format_double(r.mean) << ',' << format_double(r.stderr_mean) << '\n';
}

} // namespace rhs::harness
