// SPDX-License-Identifier: Apache-2.0
//
// Active (AP-side) beamforming: quadratic-transform auxiliaries tau, the
// closed-form precoder for a given Lagrange multiplier, and the bisection on
// that multiplier which enforces the transmit power budget.

#pragma once

#include "rhs/channel.hpp"
#include "rhs/shapes.hpp"
#include "rhs/state.hpp"

namespace rhs::active {

/// Column k holds b_k, where b_k^H = sum_s g_{s,k}^H (A o Phi_s^H) H_s.
struct EffectiveChannels {
  CMat b; // N_tr x K

  std::size_t users() const { return static_cast<std::size_t>(b.cols()); }
  std::size_t antennas() const { return static_cast<std::size_t>(b.rows()); }
};

EffectiveChannels effective_channels(const channel::ChannelSet &channels,
                                     shapes::MaskView masks, const PhaseConfig &phases);

/// Which users' channels enter the regularized inverse of the closed form.
/// all_users is the literal sum over j of |tau_j|^2 b_j b_j^H; per_user keeps
/// only the k-th term for w_k, which is the exact maximizer of the SNR-only
/// transformed objective.
enum class Coupling { all_users, per_user };

/// tau_k = sqrt(w_k (1 + chi_k)) sqrt(gamma_k) / (1 + gamma_k).
CVec update_tau(const RVec &chi, const RVec &gamma, const RVec &weights);

/// w_k = sqrt(omega_k (1 + chi_k)) tau_k (mu I + sum_j |tau_j|^2 b_j b_j^H)^-1 b_k.
/// Throws NumericError when mu == 0 and the system is singular.
Precoder update_precoder(const CVec &tau, const RVec &chi, const RVec &weights,
                         const EffectiveChannels &eff, double mu, double p_max,
                         Coupling coupling = Coupling::all_users);

/// tr(W W^H).
double transmit_power(const Precoder &precoder);
double transmit_power(const CMat &w);

struct BisectionResult {
  double mu = 0.0;
  Precoder precoder;
  std::size_t iterations = 0;
};

/// Smallest multiplier mu >= 0 whose precoder meets the budget. Returns mu = 0
/// (with the minimum-norm solution) when the budget is inactive; otherwise
/// |tr(WW^H) - p_max| / p_max <= rel_tol with tr(WW^H) <= p_max.
BisectionResult bisect_mu(const CVec &tau, const RVec &chi, const RVec &weights,
                          const EffectiveChannels &eff, double p_max,
                          Coupling coupling = Coupling::all_users, double rel_tol = 1e-6,
                          std::size_t max_iters = 200);

/// Transformed objective in scalar form:
/// sum_k 2 sqrt(omega_k (1+chi_k)) Re{tau_k^* sqrt(gamma_k)} - |tau_k|^2 (1 + gamma_k).
double p4_objective(const CVec &tau, const RVec &chi, const RVec &weights, const RVec &gamma);

/// Same objective written in the precoder, with sqrt(gamma_k) replaced by
/// b_k^H w_k (channels already normalized by the noise standard deviation).
double p4_objective(const CVec &tau, const RVec &chi, const RVec &weights,
                    const EffectiveChannels &eff, const CMat &w);

/// sum_k omega_k (1 + chi_k) gamma_k / (1 + gamma_k).
double p3_objective(const RVec &chi, const RVec &weights, const RVec &gamma);

/// Matched filter b_k / ||b_k|| with the budget split equally across users
/// whose effective channel is non-zero.
Precoder matched_filter(const EffectiveChannels &eff, const RVec &weights, double p_max);

} // namespace rhs::active
