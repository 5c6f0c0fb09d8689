// SPDX-License-Identifier: Apache-2.0

#include "rhs/ao.hpp"
#include "rhs/baselines.hpp"

#include <cmath>
#include <numbers>

namespace rhs::ao {

namespace {

std::vector<shapes::ShapeMask> masks_from(const shapes::ShapeCatalog &catalog,
                                          const std::vector<std::size_t> &indices) {
  std::vector<shapes::ShapeMask> out;
  out.reserve(indices.size());
  for (auto i : indices)
    out.push_back(catalog[i]);
  return out;
}

// State shared between the block updates of one solve() call.
struct Iterate {
  std::vector<std::size_t> indices;
  std::vector<shapes::ShapeMask> masks;
  PhaseConfig phases;
  Precoder precoder;
  RVec gammas;
  double wsr = 0.0;
  double mu = 0.0;
};

class Driver {
public:
  Driver(const channel::ChannelSet &channels, const shapes::ShapeCatalog &catalog,
         const AOConfig &config)
      : channels_(channels), catalog_(catalog), config_(config),
        weights_(resolve_weights(config, channels.users())), d_sums_(channels.d_sums()) {
    if (config.p_thr > 0.0)
      constraint_ = passive::MinPowerConstraint{channels.surfaces(), channels.d_factors,
                                                config.p_thr};
  }

  void start(AOSolution &out) {
    const std::size_t copies = config_.per_surface_masks ? channels_.surfaces() : 1;
    // Every candidate sees the same random phases; only the mask and its
    // matched filter differ.
    const std::size_t first = config_.initial_mask.value_or(0);
    const std::size_t last = config_.initial_mask ? first + 1 : catalog_.size();
    for (std::size_t j = first; j < last; ++j) {
      Iterate cand;
      cand.indices.assign(copies, j);
      cand.masks = masks_from(catalog_, cand.indices);
      std::mt19937_64 rng(config_.seed);
      auto init = initial_point(channels_, cand.masks, config_, rng);
      cand.phases = std::move(init.phases);
      cand.precoder = std::move(init.precoder);
      evaluate(cand);
      if (j == first || cand.wsr > cur_.wsr)
        cur_ = std::move(cand);
    }
    out.objective_trace.push_back(cur_.wsr);
  }

  void shape_step(AOSolution &out) {
    if (catalog_.size() < 2)
      return;
    std::vector<std::size_t> proposal;
    if (config_.per_surface_masks)
      proposal = shapes::select_shape_per_surface(catalog_, channels_, cur_.phases, cur_.precoder);
    else
      proposal = {shapes::select_shape(catalog_, channels_, cur_.phases, cur_.precoder).index};
    if (proposal == cur_.indices)
      return;
    Iterate cand = cur_;
    cand.indices = proposal;
    cand.masks = masks_from(catalog_, proposal);
    evaluate(cand);
    // Strict improvement only, so the mask cannot oscillate between ties.
    if (cand.wsr > cur_.wsr) {
      cur_ = std::move(cand);
      ++out.steps.shape_switches;
    }
  }

  void active_step(AOSolution &out, const RVec &chi) {
    auto eff = active::effective_channels(channels_, cur_.masks, cur_.phases);
    eff.b /= std::sqrt(channels_.noise_power);

    // gamma depends on |b_k^H w_k| only; rotate each column so b_k^H w_k is
    // real and non-negative, which makes real-valued tau optimal.
    Precoder aligned = cur_.precoder;
    for (Eigen::Index k = 0; k < aligned.w.cols(); ++k) {
      const Complex c = eff.b.col(k).dot(aligned.w.col(k));
      if (std::abs(c) > 0.0)
        aligned.w.col(k) *= std::conj(c) / std::abs(c);
    }
    cur_.precoder = std::move(aligned);

    const CVec tau = active::update_tau(chi, cur_.gammas, weights_);
    out.aux.tau = tau;
    auto bis = active::bisect_mu(tau, chi, weights_, eff, config_.p_max, config_.coupling);

    Iterate cand = cur_;
    cand.precoder = std::move(bis.precoder);
    cand.mu = bis.mu;
    evaluate(cand);
    if (cand.wsr >= cur_.wsr) {
      cur_ = std::move(cand);
      ++out.steps.active_accepted;
    } else {
      ++out.steps.active_rejected;
    }
  }

  void passive_step(AOSolution &out, const RVec &chi) {
    const CMat v = passive::build_v_stacks(channels_, cur_.masks, cur_.precoder, cur_.phases.eta);
    const CVec theta = cur_.phases.stacked();
    const CVec eps = passive::update_epsilon(theta, v, d_sums_, chi, weights_, channels_.noise_power);
    out.aux.epsilon = eps;
    const auto form = passive::assemble_quadratic(eps, chi, weights_, v, d_sums_);
    auto res = passive::solve_unit_modulus_qp(form, cur_.phases, constraint_, config_.passive);

    Iterate cand = cur_;
    cand.phases = config_.quantize_bits
                      ? baselines::quantize_phases(res.phases, *config_.quantize_bits)
                      : std::move(res.phases);
    evaluate(cand);
    if (cand.wsr >= cur_.wsr) {
      cur_ = std::move(cand);
      ++out.steps.passive_accepted;
    } else {
      ++out.steps.passive_rejected;
    }
  }

  void finish(AOSolution &out) {
    out.mask_indices = cur_.indices;
    out.gammas = cur_.gammas;
    out.rates = (1.0 + cur_.gammas.array()).log() / std::numbers::ln2;
    out.mu = cur_.mu;
    out.feasibility = check_min_power(channels_, cur_.masks, cur_.phases, cur_.precoder, config_.p_thr);
    out.violations = static_cast<std::size_t>((out.feasibility.array() < 0.0).count());
    if (config_.diagnostic_sinr)
      out.sinr = sinrs(channels_, cur_.masks, cur_.phases, cur_.precoder);
    out.precoder = std::move(cur_.precoder);
    out.phases = std::move(cur_.phases);
  }

  double wsr() const { return cur_.wsr; }
  const RVec &gammas() const { return cur_.gammas; }

private:
  void evaluate(Iterate &it) const {
    it.gammas = snrs(channels_, it.masks, it.phases, it.precoder);
    it.wsr = weighted_sum_rate(it.gammas, weights_);
  }

  const channel::ChannelSet &channels_;
  const shapes::ShapeCatalog &catalog_;
  const AOConfig &config_;
  RVec weights_;
  RVec d_sums_;
  std::optional<passive::MinPowerConstraint> constraint_;
  Iterate cur_;
};

} // namespace

RVec resolve_weights(const AOConfig &config, std::size_t users) {
  if (config.weights.size() == 0)
    return RVec::Ones(static_cast<Eigen::Index>(users));
  if (static_cast<std::size_t>(config.weights.size()) != users)
    throw DomainError("AO config: expected " + std::to_string(users) + " user weights");
  if ((config.weights.array() < 0.0).any())
    throw DomainError("AO config: user weights must be non-negative");
  return config.weights;
}

double snr(std::size_t k, const channel::ChannelSet &channels, shapes::MaskView masks,
           const PhaseConfig &phases, const Precoder &precoder) {
  if (k >= channels.users())
    throw DomainError("snr: user index out of range");
  return snrs(channels, masks, phases, precoder)[static_cast<Eigen::Index>(k)];
}

RVec snrs(const channel::ChannelSet &channels, shapes::MaskView masks,
          const PhaseConfig &phases, const Precoder &precoder) {
  if (precoder.users() != channels.users() || precoder.antennas() != channels.n_tr)
    throw DomainError("snr: precoder does not match channels");
  const auto eff = active::effective_channels(channels, masks, phases);
  RVec out(eff.b.cols());
  for (Eigen::Index k = 0; k < eff.b.cols(); ++k)
    out[k] = std::norm(eff.b.col(k).dot(precoder.w.col(k))) / channels.noise_power;
  return out;
}

RVec sinrs(const channel::ChannelSet &channels, shapes::MaskView masks,
           const PhaseConfig &phases, const Precoder &precoder) {
  const auto eff = active::effective_channels(channels, masks, phases);
  const CMat gains = eff.b.adjoint() * precoder.w; // (k, j) = b_k^H w_j
  RVec out(gains.rows());
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    const double signal = std::norm(gains(k, k));
    const double interference = gains.row(k).cwiseAbs2().sum() - signal;
    out[k] = signal / (interference + channels.noise_power);
  }
  return out;
}

double weighted_sum_rate(const RVec &gammas, const RVec &weights) {
  if (gammas.size() != weights.size())
    throw DomainError("weighted_sum_rate: length mismatch");
  double total = 0.0;
  for (Eigen::Index k = 0; k < gammas.size(); ++k)
    total += weights[k] * std::log2(1.0 + gammas[k]);
  return total;
}

RVec update_chi(const RVec &gammas) { return gammas; }

double p2_objective(const RVec &chi, const RVec &gammas, const RVec &weights) {
  if (chi.size() != gammas.size() || weights.size() != gammas.size())
    throw DomainError("p2_objective: length mismatch");
  double total = 0.0;
  for (Eigen::Index k = 0; k < gammas.size(); ++k)
    total += weights[k] * std::log1p(chi[k]) - weights[k] * chi[k] +
             weights[k] * (1.0 + chi[k]) * gammas[k] / (1.0 + gammas[k]);
  return total / std::numbers::ln2;
}

Eigen::MatrixXd check_min_power(const channel::ChannelSet &channels, shapes::MaskView masks,
                                const PhaseConfig &phases, const Precoder &precoder,
                                double p_thr) {
  const std::size_t S = channels.surfaces(), K = channels.users();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < S; ++s) {
    const CVec diag = shapes::apply_mask(masks[s], phases.theta[s], phases.eta);
    const CMat hw = channels.h_ap_rhs[s] * precoder.w;
    for (std::size_t k = 0; k < K; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const Complex c = (channels.g_rhs_ue[s][k].conjugate().array() * diag.array() *
                         hw.col(kk).array())
                            .sum();
      out(static_cast<Eigen::Index>(s), kk) = std::norm(c) - p_thr;
    }
  }
  return out;
}

InitialPoint initial_point(const channel::ChannelSet &channels, shapes::MaskView masks,
                           const AOConfig &config, std::mt19937_64 &rng) {
  InitialPoint init;
  init.phases = PhaseConfig::random(channels.surfaces(), channels.m_elems, rng, config.eta);
  if (config.quantize_bits)
    init.phases = baselines::quantize_phases(init.phases, *config.quantize_bits);
  const auto eff = active::effective_channels(channels, masks, init.phases);
  init.precoder = active::matched_filter(eff, resolve_weights(config, channels.users()), config.p_max);
  return init;
}

AOSolution solve(const channel::ChannelSet &channels, const shapes::ShapeCatalog &catalog,
                 const AOConfig &config) {
  channels.validate();
  if (catalog.empty())
    throw DomainError("solve: empty shape catalog");
  if (catalog.grid().size() != channels.m_elems)
    throw DomainError("solve: catalog grid has " + std::to_string(catalog.grid().size()) +
                      " elements, channels have " + std::to_string(channels.m_elems));
  if (config.initial_mask && *config.initial_mask >= catalog.size())
    throw DomainError("solve: initial mask index out of range");
  if (!(config.p_max > 0.0))
    throw DomainError("solve: p_max must be positive");

  AOSolution out;
  Driver driver(channels, catalog, config);
  driver.start(out);

  for (std::size_t it = 0; it < config.max_outer; ++it) {
    const RVec chi = update_chi(driver.gammas());
    out.aux.chi = chi;
    driver.shape_step(out);
    driver.active_step(out, chi);
    driver.passive_step(out, chi);

    out.objective_trace.push_back(driver.wsr());
    out.iterations = it + 1;
    out.aux.iteration = it + 1;
    const double last = out.objective_trace.back();
    const double prev = out.objective_trace[out.objective_trace.size() - 2];
    if (std::abs(last - prev) <= config.tol_outer * std::abs(last)) {
      out.converged = true;
      break;
    }
  }

  if (config.quantize_bits) {
    // One precoder refresh against the final quantized phases.
    driver.active_step(out, update_chi(driver.gammas()));
    if (driver.wsr() != out.objective_trace.back())
      out.objective_trace.push_back(driver.wsr());
  }

  driver.finish(out);
  return out;
}

} // namespace rhs::ao
