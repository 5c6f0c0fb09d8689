// SPDX-License-Identifier: Apache-2.0
//
// Network geometry, log-distance path loss with log-normal shadowing, and
// i.i.d. Rayleigh channel realizations for the AP -> surface -> UE cascade.

#pragma once

#include "rhs/types.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace rhs::channel {

using Point = std::array<double, 2>;
using Rng = std::mt19937_64;

double distance(const Point &a, const Point &b);

struct NetworkLayout {
  Point ap_position{0.0, 0.0};
  std::vector<Point> rhs_positions;
  /// Fixed UE positions. When empty, build_network() draws K positions
  /// uniformly inside the UE region.
  std::vector<Point> ue_positions;
  Point ue_center{40.0, 0.0};
  double ue_radius = 10.0;
  double path_loss_exponent = 2.0;

  void validate() const;

  /// Surfaces evenly spaced on a circle of radius 20 m around (20 m, 0 m).
  /// Four surfaces sit at 45, 135, 225 and 315 degrees; no count puts one on the AP.
  static std::vector<Point> default_rhs_positions(std::size_t count);
};

struct PathLossModel {
  double rho_a = 61.4;
  double rho_b = 2.0;
  double sigma_delta = 5.8;

  void validate() const;
};

struct Dims {
  std::size_t surfaces = 0; // S
  std::size_t users = 0;    // K
  std::size_t elements = 0; // M
  std::size_t antennas = 0; // N_tr
};

/// One immutable network realization.
struct ChannelSet {
  std::vector<CMat> h_ap_rhs;               // S matrices, M x N_tr
  std::vector<std::vector<CVec>> g_rhs_ue;  // [s][k], length M
  Eigen::MatrixXd d_factors;                // S x K
  double noise_power = 0.0;                 // watts
  std::size_t n_tr = 0;
  std::size_t m_elems = 0;
  std::vector<Point> ue_positions;

  std::size_t surfaces() const { return h_ap_rhs.size(); }
  std::size_t users() const { return g_rhs_ue.empty() ? 0 : g_rhs_ue.front().size(); }

  /// Throws DomainError when dimensions disagree or d/noise are non-positive.
  void validate() const;

  /// Sum over surfaces of d_{s,k}, one entry per user.
  RVec d_sums() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// rho_a + 10 rho_b log10(r) + shadowing.
double path_loss_db(double r, const PathLossModel &model, double shadowing_db);

/// Entries i.i.d. CN(0, 10^(-pl_db/10)).
CMat draw_channel_matrix(std::size_t rows, std::size_t cols, double pl_db, Rng &rng);

/// sqrt(r_ap^kappa * r_ue^kappa).
double distance_factor(double r_ap_rhs, double r_rhs_ue, double kappa);

ChannelSet build_network(const NetworkLayout &layout, const PathLossModel &model,
                         const Dims &dims, double noise_dbm, Rng &rng);

} // namespace rhs::channel
