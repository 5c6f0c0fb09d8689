// SPDX-License-Identifier: Apache-2.0

#include "rhs/baselines.hpp"

#include <cmath>
#include <numbers>

namespace rhs::baselines {

PhaseConfig quantize_phases(const PhaseConfig &phases, unsigned bits) {
  if (bits < 1 || bits > 30)
    throw DomainError("quantize_phases: bits must lie in [1, 30]");
  const double levels = std::ldexp(1.0, static_cast<int>(bits));
  const auto count = static_cast<long long>(levels);
  const double step = 2.0 * std::numbers::pi / levels;

  PhaseConfig out = phases;
  for (auto &theta : out.theta)
    for (auto &x : theta) {
      double phi = std::arg(x);
      if (phi < 0.0)
        phi += 2.0 * std::numbers::pi;
      const double pos = phi / step;
      auto t = static_cast<long long>(std::floor(pos));
      if (pos - static_cast<double>(t) > 0.5)
        ++t;
      t %= count;
      x = std::polar(1.0, step * static_cast<double>(t));
    }
  return out;
}

Precoder zf_precoder(const active::EffectiveChannels &eff, const RVec &weights, double p_max) {
  const Eigen::Index N = eff.b.rows(), K = eff.b.cols();
  if (K > N)
    throw NumericError("zf_precoder: more users than antennas");
  if (!(p_max > 0.0))
    throw DomainError("zf_precoder: p_max must be positive");

  // b = [b_1 ... b_K] = B^H. With b = QR, B^H (B B^H)^-1 = Q R^-H.
  Eigen::HouseholderQR<CMat> qr(eff.b);
  const CMat r = qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  const RVec diag = r.diagonal().cwiseAbs();
  if (diag.size() == 0 || !(diag.minCoeff() > 1e-12 * diag.maxCoeff()))
    throw NumericError("zf_precoder: effective channels are rank deficient");
  const CMat q = qr.householderQ() * CMat::Identity(N, K);
  const CMat r_inv_h = r.adjoint().triangularView<Eigen::Lower>().solve(CMat::Identity(K, K));
  CMat w = q * r_inv_h;

  const double per_user = std::sqrt(p_max / static_cast<double>(K));
  for (Eigen::Index k = 0; k < K; ++k)
    w.col(k) *= per_user / w.col(k).norm();
  return {w, weights, p_max};
}

ao::AOSolution run_baseline(const BaselineKind &kind, const channel::ChannelSet &channels,
                            const shapes::ShapeCatalog &catalog, const ao::AOConfig &config) {
  auto fixed_catalog = [&](std::size_t index) {
    if (index >= catalog.size())
      throw DomainError("run_baseline: mask index out of range");
    return shapes::ShapeCatalog({catalog[index]});
  };
  auto relabel = [](ao::AOSolution &sol, std::size_t index) {
    for (auto &i : sol.mask_indices)
      i = index;
  };

  if (const auto *fixed = std::get_if<FixedShape>(&kind)) {
    ao::AOConfig cfg = config;
    cfg.initial_mask = 0;
    auto sol = ao::solve(channels, fixed_catalog(fixed->mask_index), cfg);
    relabel(sol, fixed->mask_index);
    return sol;
  }

  if (const auto *quant = std::get_if<Quantized>(&kind)) {
    if (quant->bits < 1)
      throw DomainError("run_baseline: quantized baseline needs bits >= 1");
    ao::AOConfig cfg = config;
    cfg.initial_mask = 0;
    cfg.quantize_bits = quant->bits;
    auto sol = ao::solve(channels, fixed_catalog(quant->mask_index), cfg);
    relabel(sol, quant->mask_index);
    return sol;
  }

  const auto &zf = std::get<ZfRandom>(kind);
  channels.validate();
  const auto single = fixed_catalog(zf.mask_index);
  const shapes::ShapeMask &mask = single[0];
  const RVec weights = ao::resolve_weights(config, channels.users());
  std::mt19937_64 rng(config.seed);
  const PhaseConfig phases =
      PhaseConfig::random(channels.surfaces(), channels.m_elems, rng, config.eta);
  const auto eff = active::effective_channels(channels, mask, phases);

  ao::AOSolution sol;
  sol.mask_indices.assign(config.per_surface_masks ? channels.surfaces() : 1, zf.mask_index);
  sol.precoder = zf_precoder(eff, weights, config.p_max);
  sol.phases = phases;
  sol.gammas = ao::snrs(channels, mask, phases, sol.precoder);
  sol.rates = (1.0 + sol.gammas.array()).log() / std::numbers::ln2;
  sol.objective_trace = {ao::weighted_sum_rate(sol.gammas, weights)};
  sol.feasibility = ao::check_min_power(channels, mask, phases, sol.precoder, config.p_thr);
  sol.violations = static_cast<std::size_t>((sol.feasibility.array() < 0.0).count());
  sol.converged = true;
  if (config.diagnostic_sinr)
    sol.sinr = ao::sinrs(channels, mask, phases, sol.precoder);
  return sol;
}

} // namespace rhs::baselines
