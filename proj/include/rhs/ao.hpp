// SPDX-License-Identifier: Apache-2.0
//
// Alternating optimization of shape, AP precoder and surface phases for the
// weighted sum rate. Each outer iteration refreshes chi from the current SNRs,
// then runs the shape, active and passive block updates in that order.

#pragma once

#include "rhs/active.hpp"
#include "rhs/channel.hpp"
#include "rhs/passive.hpp"
#include "rhs/shapes.hpp"
#include "rhs/state.hpp"

#include <cstdint>
#include <optional>

namespace rhs::ao {

struct AuxState {
  RVec chi;
  CVec tau;
  CVec epsilon;
  std::size_t iteration = 0;
};

struct AOConfig {
  double p_max = 1.0;  // watts
  double p_thr = 0.0;  // watts, per (s, k); 0 disables the min-power penalty
  RVec weights;        // empty: uniform
  double eta = 1.0;
  double tol_outer = 1e-4;
  std::size_t max_outer = 100;
  passive::SolverOptions passive{};
  active::Coupling coupling = active::Coupling::per_user;
  bool per_surface_masks = false;
  bool diagnostic_sinr = false;
  /// Unset: start from the catalog member whose initial point rates best.
  std::optional<std::size_t> initial_mask;
  /// When set, phases are quantized to this many bits after every passive
  /// update and at initialization.
  std::optional<unsigned> quantize_bits;
  std::uint64_t seed = 0;
};

struct StepCounts {
  std::size_t shape_switches = 0;
  std::size_t active_accepted = 0;
  std::size_t active_rejected = 0;
  std::size_t passive_accepted = 0;
  std::size_t passive_rejected = 0;
};

struct AOSolution {
  std::vector<std::size_t> mask_indices; // one entry, or one per surface
  Precoder precoder;
  PhaseConfig phases;
  RVec gammas;
  RVec rates; // bits/s/Hz per user
  std::vector<double> objective_trace;
  Eigen::MatrixXd feasibility; // S x K min-power margins (watts)
  std::size_t violations = 0;
  double mu = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  AuxState aux;
  StepCounts steps;
  RVec sinr; // diagnostic only; empty unless requested

  std::size_t mask_index() const { return mask_indices.front(); }
  double objective() const { return objective_trace.back(); }
};

/// |sum_s g_{s,k}^H (A o Phi_s^H) H_s w_k|^2 / noise.
double snr(std::size_t k, const channel::ChannelSet &channels, shapes::MaskView masks,
           const PhaseConfig &phases, const Precoder &precoder);
RVec snrs(const channel::ChannelSet &channels, shapes::MaskView masks,
          const PhaseConfig &phases, const Precoder &precoder);

/// SINR with the inter-user term kept separate from the noise. Diagnostic.
RVec sinrs(const channel::ChannelSet &channels, shapes::MaskView masks,
           const PhaseConfig &phases, const Precoder &precoder);

/// sum_k omega_k log2(1 + gamma_k).
double weighted_sum_rate(const RVec &gammas, const RVec &weights);

RVec update_chi(const RVec &gammas);

/// (1/ln 2) sum_k [omega_k ln(1+chi_k) - omega_k chi_k + omega_k (1+chi_k) gamma_k/(1+gamma_k)].
double p2_objective(const RVec &chi, const RVec &gammas, const RVec &weights);

/// |g_{s,k}^H (A o Phi_s^H) H_s w_k|^2 - p_thr for every (s, k).
Eigen::MatrixXd check_min_power(const channel::ChannelSet &channels, shapes::MaskView masks,
                                const PhaseConfig &phases, const Precoder &precoder,
                                double p_thr);

/// Runs the alternating optimization from a seeded random-phase,
/// matched-filter start. A block update is kept only if it does not lower the
/// weighted sum rate, so objective_trace is non-decreasing.
AOSolution solve(const channel::ChannelSet &channels, const shapes::ShapeCatalog &catalog,
                 const AOConfig &config);

/// Starting point used by solve(): phases drawn from the seeded generator,
/// matched-filter precoder at full power.
struct InitialPoint {
  PhaseConfig phases;
  Precoder precoder;
};
InitialPoint initial_point(const channel::ChannelSet &channels, shapes::MaskView masks,
                           const AOConfig &config, std::mt19937_64 &rng);

RVec resolve_weights(const AOConfig &config, std::size_t users);

} // namespace rhs::ao
