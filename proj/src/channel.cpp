// SPDX-License-Identifier: Apache-2.0

#include "rhs/channel.hpp"

#include <cmath>
#include <numbers>

namespace rhs::channel {

namespace {

bool finite(const Point &p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

Point draw_in_disk(const Point &center, double radius, Rng &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return {center[0] + r * std::cos(phi), center[1] + r * std::sin(phi)};
}

} // namespace

double distance(const Point &a, const Point &b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void NetworkLayout::validate() const {
  if (rhs_positions.empty())
    throw DomainError("layout: at least one surface position is required");
  if (!finite(ap_position) || !finite(ue_center))
    throw DomainError("layout: non-finite AP or UE-region coordinates");
  for (const auto &q : rhs_positions)
    if (!finite(q))
      throw DomainError("layout: non-finite surface position");
  for (const auto &u : ue_positions)
    if (!finite(u))
      throw DomainError("layout: non-finite UE position");
  if (!(ue_radius > 0.0) || !std::isfinite(ue_radius))
    throw DomainError("layout: UE region radius must be positive");
  if (!std::isfinite(path_loss_exponent))
    throw DomainError("layout: path-loss exponent must be finite");
}

std::vector<Point> NetworkLayout::default_rhs_positions(std::size_t count) {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // The circle passes through the AP at phi = pi; a half-step offset for
    // even counts (none for odd) keeps every point off it.
    const double offset = count % 2 == 0 ? 0.5 : 0.0;
    const double phi = 2.0 * std::numbers::pi * (static_cast<double>(i) + offset) /
                       static_cast<double>(count);
    out.push_back({20.0 + 20.0 * std::cos(phi), 20.0 * std::sin(phi)});
  }
  return out;
}

void PathLossModel::validate() const {
  if (!std::isfinite(rho_a) || !std::isfinite(rho_b))
    throw DomainError("path loss: coefficients must be finite");
  if (!(sigma_delta >= 0.0) || !std::isfinite(sigma_delta))
    throw DomainError("path loss: shadowing deviation must be >= 0");
}

void ChannelSet::validate() const {
  const std::size_t S = h_ap_rhs.size();
  if (S == 0 || g_rhs_ue.size() != S)
    throw DomainError("channel set: surface count mismatch");
  const std::size_t K = g_rhs_ue.front().size();
  if (K == 0)
    throw DomainError("channel set: no users");
  for (std::size_t s = 0; s < S; ++s) {
    if (static_cast<std::size_t>(h_ap_rhs[s].rows()) != m_elems ||
        static_cast<std::size_t>(h_ap_rhs[s].cols()) != n_tr)
      throw DomainError("channel set: H_s has wrong shape");
    if (g_rhs_ue[s].size() != K)
      throw DomainError("channel set: user count differs across surfaces");
    for (const auto &g : g_rhs_ue[s])
      if (static_cast<std::size_t>(g.size()) != m_elems)
        throw DomainError("channel set: g_{s,k} has wrong length");
  }
  if (static_cast<std::size_t>(d_factors.rows()) != S ||
      static_cast<std::size_t>(d_factors.cols()) != K)
    throw DomainError("channel set: distance factors have wrong shape");
  if (!(d_factors.array() > 0.0).all())
    throw DomainError("channel set: distance factors must be positive");
  if (!(noise_power > 0.0))
    throw DomainError("channel set: noise power must be positive");
}

RVec ChannelSet::d_sums() const { return d_factors.colwise().sum().transpose(); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double path_loss_db(double r, const PathLossModel &model, double shadowing_db) {
  if (!(r > 0.0))
    throw DomainError("path loss: distance must be positive");
  return model.rho_a + 10.0 * model.rho_b * std::log10(r) + shadowing_db;
}

CMat draw_channel_matrix(std::size_t rows, std::size_t cols, double pl_db, Rng &rng) {
  // Real and imaginary parts each carry half of the entry variance.
  const double variance = std::pow(10.0, -0.1 * pl_db);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  CMat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(r, c) = Complex(re, im);
    }
  return out;
}

double distance_factor(double r_ap_rhs, double r_rhs_ue, double kappa) {
  return std::sqrt(std::pow(r_ap_rhs, kappa) * std::pow(r_rhs_ue, kappa));
}

ChannelSet build_network(const NetworkLayout &layout, const PathLossModel &model,
                         const Dims &dims, double noise_dbm, Rng &rng) {
  layout.validate();
  model.validate();
  if (dims.surfaces == 0 || dims.users == 0 || dims.elements == 0 || dims.antennas == 0)
    throw DomainError("build_network: all dimensions must be positive");
  if (layout.rhs_positions.size() != dims.surfaces)
    throw DomainError("build_network: layout has " +
                      std::to_string(layout.rhs_positions.size()) +
                      " surface positions but S = " + std::to_string(dims.surfaces));
  if (!layout.ue_positions.empty() && layout.ue_positions.size() != dims.users)
    throw DomainError("build_network: fixed UE positions do not match K");
  if (!std::isfinite(noise_dbm))
    throw DomainError("build_network: noise power must be finite");

  const std::size_t S = dims.surfaces, K = dims.users;

  ChannelSet out;
  out.n_tr = dims.antennas;
  out.m_elems = dims.elements;
  out.noise_power = dbm_to_watts(noise_dbm);

  out.ue_positions = layout.ue_positions;
  if (out.ue_positions.empty())
    for (std::size_t k = 0; k < K; ++k)
      out.ue_positions.push_back(draw_in_disk(layout.ue_center, layout.ue_radius, rng));

  std::normal_distribution<double> shadowing(0.0, model.sigma_delta);
  auto draw_shadowing = [&] { return model.sigma_delta > 0.0 ? shadowing(rng) : 0.0; };

  out.h_ap_rhs.reserve(S);
  out.g_rhs_ue.assign(S, {});
  out.d_factors.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < S; ++s) {
    const Point &q = layout.rhs_positions[s];
    const double r_ap = distance(layout.ap_position, q);
    if (!(r_ap > 0.0))
      throw DomainError("build_network: surface " + std::to_string(s) +
                        " coincides with the AP");
    const double pl_ap = path_loss_db(r_ap, model, draw_shadowing());
    out.h_ap_rhs.push_back(draw_channel_matrix(dims.elements, dims.antennas, pl_ap, rng));

    for (std::size_t k = 0; k < K; ++k) {
      const double r_ue = distance(q, out.ue_positions[k]);
      if (!(r_ue > 0.0))
        throw DomainError("build_network: surface " + std::to_string(s) +
                          " coincides with UE " + std::to_string(k));
      const double pl_ue = path_loss_db(r_ue, model, draw_shadowing());
      out.g_rhs_ue[s].push_back(draw_channel_matrix(dims.elements, 1, pl_ue, rng).col(0));
      out.d_factors(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) =
          distance_factor(r_ap, r_ue, layout.path_loss_exponent);
    }
  }
  return out;
}

} // namespace rhs::channel
