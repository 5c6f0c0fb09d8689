// SPDX-License-Identifier: Apache-2.0
//
// Passive (surface-side) beamforming. The ratio objective in the stacked
// phase vector is turned into a concave quadratic by the quadratic transform,
// and the quadratic is maximized over the product of unit circles by projected
// gradient ascent with backtracking. Per-link minimum received power enters
// through an additive penalty whose coefficient is ramped geometrically.

#pragma once

#include "rhs/channel.hpp"
#include "rhs/shapes.hpp"
#include "rhs/state.hpp"

#include <optional>

namespace rhs::passive {

/// v_{s,k} = sqrt(eta) diag(g_{s,k}^H) H_s w_k, masked element-wise.
CVec build_v(const channel::ChannelSet &channels, const shapes::ShapeMask &mask,
             const Precoder &precoder, std::size_t s, std::size_t k, double eta = 1.0);

/// Column k is vec([v_{1,k} | ... | v_{S,k}]), length S*M.
CMat build_v_stacks(const channel::ChannelSet &channels, shapes::MaskView masks,
                    const Precoder &precoder, double eta = 1.0);

/// Optimal auxiliaries of the transformed ratio objective:
/// eps_k = sqrt(omega_k (1+chi_k)) u_k / (|u_k|^2 + noise |sum_s d_{s,k}|^2),
/// with u_k = vec(Theta)^H vec(V_k).
CVec update_epsilon(const CVec &theta_stack, const CMat &v_stacks, const RVec &d_sums,
                    const RVec &chi, const RVec &weights, double noise_power);

/// sum_k omega_k (1+chi_k) |u_k|^2 / (|u_k|^2 + noise |sum_s d_{s,k}|^2).
double p5_objective(const CVec &theta_stack, const CMat &v_stacks, const RVec &d_sums,
                    const RVec &chi, const RVec &weights, double noise_power);

/// sum_k 2 sqrt(omega_k (1+chi_k)) Re{eps_k^* u_k} - |eps_k|^2 (|u_k|^2 + noise |sum_s d|^2).
double p6_objective(const CVec &epsilon, const CVec &theta_stack, const CMat &v_stacks,
                    const RVec &d_sums, const RVec &chi, const RVec &weights,
                    double noise_power);

/// Upsilon = sum_k |eps_k|^2 V_k V_k^H held in factored form, and the linear
/// term z = sum_k eps_k^* sqrt(omega_k (1+chi_k)) V_k.
struct QuadraticForm {
  CMat v_stacks;       // S*M x K
  RVec factor_weights; // |eps_k|^2
  CVec z;
  RVec d_sums;

  Eigen::Index dim() const { return z.size(); }

  /// Throws NumericError if any factor weight is negative beyond 1e-10
  /// (an indefinite Upsilon), DomainError on shape mismatch.
  void validate() const;

  CMat upsilon() const;
  CVec apply_upsilon(const CVec &theta) const;
  double lambda_max() const;

  /// -theta^H Upsilon theta + 2 Re{theta^H z}
  double objective(const CVec &theta) const;
  /// 2 (z - Upsilon theta), the gradient with real and imaginary parts as
  /// independent coordinates packed into one complex vector.
  CVec gradient(const CVec &theta) const;
};

QuadraticForm assemble_quadratic(const CVec &epsilon, const RVec &chi, const RVec &weights,
                                 const CMat &v_stacks, const RVec &d_sums);

/// |Theta_s^H v_{s,k}|^2 / d_{s,k}^2 >= threshold for every (s, k).
struct MinPowerConstraint {
  std::size_t surfaces = 0;
  Eigen::MatrixXd d_factors; // S x K
  double threshold = 0.0;    // watts

  /// threshold - |Theta_s^H v_{s,k}|^2 / d_{s,k}^2, positive where violated.
  Eigen::MatrixXd shortfall(const CVec &theta_stack, const CMat &v_stacks) const;
};

struct SolverOptions {
  std::size_t max_iters = 500; // per penalty round
  double tol = 1e-6;
  std::size_t penalty_rounds = 5;
  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  std::size_t max_backtracks = 50;
  bool record_history = false;
};

struct SolverResult {
  PhaseConfig phases;
  double objective = 0.0;         // unpenalized
  double initial_objective = 0.0; // unpenalized, at theta_init
  std::size_t iterations = 0;     // across all rounds
  std::size_t rounds = 0;
  std::size_t selected_round = 0;
  Eigen::MatrixXd shortfall; // empty when no constraint was given
  std::size_t violations = 0;
  /// Penalized objective after every accepted iterate, one vector per round.
  std::vector<std::vector<double>> history;
};

SolverResult solve_unit_modulus_qp(const QuadraticForm &form, const PhaseConfig &theta_init,
                                   const std::optional<MinPowerConstraint> &min_power = {},
                                   const SolverOptions &options = {});

/// Element-wise x / |x|; entries with x == 0 keep the fallback's value.
CVec project_unit_modulus(const CVec &x, const CVec &fallback);

} // namespace rhs::passive
