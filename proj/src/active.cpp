// SPDX-License-Identifier: Apache-2.0

#include "rhs/active.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace rhs::active {

namespace {

void check_user_vectors(const RVec &chi, const RVec &weights, Eigen::Index K,
                        const char *where) {
  if (chi.size() != K || weights.size() != K)
    throw DomainError(std::string(where) + ": per-user vectors must have length K");
}

RVec amplitude(const RVec &chi, const RVec &weights) {
  return (weights.array() * (1.0 + chi.array())).sqrt().matrix();
}

// Eigen-decomposition of sum_j |tau_j|^2 b_j b_j^H, reused for every mu.
struct CoupledSystem {
  Eigen::SelfAdjointEigenSolver<CMat> eig;
  CMat projected; // U^H b_k scaled by sqrt(omega_k(1+chi_k)) tau_k

  CoupledSystem(const CVec &tau, const RVec &amp, const EffectiveChannels &eff) {
    const Eigen::Index N = eff.b.rows();
    CMat r = CMat::Zero(N, N);
    for (Eigen::Index j = 0; j < eff.b.cols(); ++j)
      r.noalias() += std::norm(tau[j]) * eff.b.col(j) * eff.b.col(j).adjoint();
    eig.compute(r);
    projected = eig.eigenvectors().adjoint() * eff.b;
    for (Eigen::Index k = 0; k < eff.b.cols(); ++k)
      projected.col(k) *= amp[k] * tau[k];
  }

  double lambda_max() const { return std::max(eig.eigenvalues().maxCoeff(), 0.0); }

  // Eigenvalues at or below this are treated as zero in the pseudo-inverse.
  double cutoff() const { return 1e-12 * lambda_max(); }

  double power(double mu) const {
    const RVec &lam = eig.eigenvalues();
    double total = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double denom = mu + std::max(lam[i], 0.0);
      if (mu == 0.0 && lam[i] <= cutoff())
        continue;
      total += projected.row(i).squaredNorm() / (denom * denom);
    }
    return total;
  }

  CMat solve(double mu) const {
    const RVec &lam = eig.eigenvalues();
    CMat scaled = projected;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (mu == 0.0 && lam[i] <= cutoff())
        scaled.row(i).setZero();
      else
        scaled.row(i) /= mu + std::max(lam[i], 0.0);
    }
    return eig.eigenvectors() * scaled;
  }
};

// w_k = c_k b_k / (mu + |tau_k|^2 ||b_k||^2) by Sherman-Morrison.
CMat solve_per_user(const CVec &tau, const RVec &amp, const EffectiveChannels &eff,
                    double mu) {
  CMat w(eff.b.rows(), eff.b.cols());
  for (Eigen::Index k = 0; k < eff.b.cols(); ++k) {
    const double denom = mu + std::norm(tau[k]) * eff.b.col(k).squaredNorm();
    if (tau[k] == 0.0)
      w.col(k).setZero();
    else if (!(denom > 0.0))
      throw NumericError("update_precoder: singular system at mu = 0");
    else
      w.col(k) = (amp[k] * tau[k] / denom) * eff.b.col(k);
  }
  return w;
}

} // namespace

EffectiveChannels effective_channels(const channel::ChannelSet &channels,
                                     shapes::MaskView masks, const PhaseConfig &phases) {
  const std::size_t S = channels.surfaces(), K = channels.users();
  if (phases.surfaces() != S || phases.elements() != channels.m_elems)
    throw DomainError("effective_channels: phase configuration does not match channels");
  EffectiveChannels eff{CMat::Zero(static_cast<Eigen::Index>(channels.n_tr),
                                   static_cast<Eigen::Index>(K))};
  for (std::size_t s = 0; s < S; ++s) {
    const CVec diag = shapes::apply_mask(masks[s], phases.theta[s], phases.eta);
    for (std::size_t k = 0; k < K; ++k) {
      const CVec weighted = (diag.conjugate().array() * channels.g_rhs_ue[s][k].array()).matrix();
      eff.b.col(static_cast<Eigen::Index>(k)).noalias() +=
          channels.h_ap_rhs[s].adjoint() * weighted;
    }
  }
  return eff;
}

CVec update_tau(const RVec &chi, const RVec &gamma, const RVec &weights) {
  check_user_vectors(chi, weights, gamma.size(), "update_tau");
  CVec tau(gamma.size());
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    tau[k] = std::sqrt(weights[k] * (1.0 + chi[k])) * std::sqrt(gamma[k]) / (1.0 + gamma[k]);
  return tau;
}

Precoder update_precoder(const CVec &tau, const RVec &chi, const RVec &weights,
                         const EffectiveChannels &eff, double mu, double p_max,
                         Coupling coupling) {
  const Eigen::Index K = eff.b.cols();
  check_user_vectors(chi, weights, K, "update_precoder");
  if (tau.size() != K)
    throw DomainError("update_precoder: tau must have length K");
  if (!(mu >= 0.0))
    throw DomainError("update_precoder: mu must be non-negative");
  const RVec amp = amplitude(chi, weights);

  Precoder out{CMat(), weights, p_max};
  if (coupling == Coupling::per_user) {
    out.w = solve_per_user(tau, amp, eff, mu);
    return out;
  }

  const Eigen::Index N = eff.b.rows();
  CMat r = mu * CMat::Identity(N, N);
  for (Eigen::Index j = 0; j < K; ++j)
    r.noalias() += std::norm(tau[j]) * eff.b.col(j) * eff.b.col(j).adjoint();
  CMat rhs = eff.b;
  for (Eigen::Index k = 0; k < K; ++k)
    rhs.col(k) *= amp[k] * tau[k];
  if (rhs.isZero(0.0)) {
    out.w = CMat::Zero(N, K);
    return out;
  }

  Eigen::LLT<CMat> llt(r);
  if (llt.info() != Eigen::Success)
    throw NumericError("update_precoder: singular system at mu = " + std::to_string(mu) +
                       "; use mu > 0");
  if (mu == 0.0) {
    // LLT succeeds on numerically semidefinite input; check conditioning.
    const RVec diag = llt.matrixL().toDenseMatrix().diagonal().real();
    if (diag.minCoeff() <= 1e-6 * diag.maxCoeff())
      throw NumericError("update_precoder: singular system at mu = 0; use mu > 0");
  }
  out.w = llt.solve(rhs);
  return out;
}

double transmit_power(const CMat &w) { return w.squaredNorm(); }

double transmit_power(const Precoder &precoder) { return transmit_power(precoder.w); }

BisectionResult bisect_mu(const CVec &tau, const RVec &chi, const RVec &weights,
                          const EffectiveChannels &eff, double p_max, Coupling coupling,
                          double rel_tol, std::size_t max_iters) {
  if (!(p_max > 0.0))
    throw DomainError("bisect_mu: p_max must be positive");
  const Eigen::Index K = eff.b.cols();
  check_user_vectors(chi, weights, K, "bisect_mu");
  const RVec amp = amplitude(chi, weights);

  BisectionResult out;
  out.precoder = {CMat::Zero(eff.b.rows(), K), weights, p_max};
  if (tau.isZero(0.0))
    return out;

  std::function<double(double)> power;
  std::function<CMat(double)> solve;
  std::optional<CoupledSystem> system;
  if (coupling == Coupling::all_users) {
    system.emplace(tau, amp, eff);
    power = [&](double mu) { return system->power(mu); };
    solve = [&](double mu) { return system->solve(mu); };
  } else {
    // At mu = 0 a user with b_k = 0 contributes nothing (minimum-norm solution).
    solve = [&](double mu) {
      CMat w = CMat::Zero(eff.b.rows(), K);
      for (Eigen::Index k = 0; k < K; ++k) {
        const double denom = mu + std::norm(tau[k]) * eff.b.col(k).squaredNorm();
        if (tau[k] != 0.0 && denom > 0.0)
          w.col(k) = (amp[k] * tau[k] / denom) * eff.b.col(k);
      }
      return w;
    };
    power = [&](double mu) { return solve(mu).squaredNorm(); };
  }

  // Power is non-increasing in mu, so the budget is inactive iff it holds at 0.
  if (power(0.0) <= p_max) {
    out.precoder.w = solve(0.0);
    return out;
  }

  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 2100 && power(hi) > p_max; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (power(hi) > p_max)
    throw NumericError("bisect_mu: could not bracket the multiplier");

  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    const double p_hi = power(hi);
    if (std::abs(p_hi - p_max) <= rel_tol * p_max)
      break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (power(mid) > p_max)
      lo = mid;
    else
      hi = mid;
  }
  out.mu = hi;
  out.iterations = it;
  out.precoder.w = solve(hi);
  return out;
}

double p4_objective(const CVec &tau, const RVec &chi, const RVec &weights, const RVec &gamma) {
  check_user_vectors(chi, weights, gamma.size(), "p4_objective");
  const RVec amp = amplitude(chi, weights);
  double total = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    total += 2.0 * amp[k] * std::real(std::conj(tau[k]) * std::sqrt(gamma[k])) -
             std::norm(tau[k]) * (1.0 + gamma[k]);
  return total;
}

double p4_objective(const CVec &tau, const RVec &chi, const RVec &weights,
                    const EffectiveChannels &eff, const CMat &w) {
  const Eigen::Index K = eff.b.cols();
  check_user_vectors(chi, weights, K, "p4_objective");
  const RVec amp = amplitude(chi, weights);
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const Complex c = eff.b.col(k).dot(w.col(k)); // b_k^H w_k
    total += 2.0 * amp[k] * std::real(std::conj(tau[k]) * c) - std::norm(tau[k]) * (1.0 + std::norm(c));
  }
  return total;
}

double p3_objective(const RVec &chi, const RVec &weights, const RVec &gamma) {
  check_user_vectors(chi, weights, gamma.size(), "p3_objective");
  return (weights.array() * (1.0 + chi.array()) * gamma.array() / (1.0 + gamma.array())).sum();
}

Precoder matched_filter(const EffectiveChannels &eff, const RVec &weights, double p_max) {
  const Eigen::Index K = eff.b.cols();
  Precoder out{CMat::Zero(eff.b.rows(), K), weights, p_max};
  Eigen::Index live = 0;
  for (Eigen::Index k = 0; k < K; ++k)
    live += eff.b.col(k).norm() > 0.0 ? 1 : 0;
  if (live == 0)
    return out;
  const double per_user = std::sqrt(p_max / static_cast<double>(live));
  for (Eigen::Index k = 0; k < K; ++k) {
    const double norm = eff.b.col(k).norm();
    if (norm > 0.0)
      out.w.col(k) = (per_user / norm) * eff.b.col(k);
  }
  return out;
}

} // namespace rhs::active
