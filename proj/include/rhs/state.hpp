// SPDX-License-Identifier: Apache-2.0
//
// Optimization variables shared between the shape, active and passive steps.

#pragma once

#include "rhs/types.hpp"

#include <random>

namespace rhs {

/// Unit-modulus phase vectors, one per surface, and the reflection
/// coefficient eta (0 < eta <= 1).
struct PhaseConfig {
  std::vector<CVec> theta;
  double eta = 1.0;

  std::size_t surfaces() const { return theta.size(); }
  std::size_t elements() const { return theta.empty() ? 0 : static_cast<std::size_t>(theta.front().size()); }

  /// vec of [Theta_1 | ... | Theta_S], length S*M.
  CVec stacked() const;
  static PhaseConfig from_stacked(const CVec &stack, std::size_t surfaces, double eta = 1.0);

  /// i.i.d. uniform phases on [0, 2 pi).
  static PhaseConfig random(std::size_t surfaces, std::size_t elements, std::mt19937_64 &rng,
                            double eta = 1.0);
  static PhaseConfig constant(std::size_t surfaces, std::size_t elements, Complex value = 1.0,
                              double eta = 1.0);

  /// max over all entries of ||theta| - 1|.
  double max_modulus_error() const;

  /// Throws DomainError on a bad eta or inconsistent lengths.
  void validate() const;
};

/// AP precoder W = [w_1 ... w_K] (N_tr x K) with per-user rate weights.
struct Precoder {
  CMat w;
  RVec weights;
  double p_max = 0.0;

  std::size_t users() const { return static_cast<std::size_t>(w.cols()); }
  std::size_t antennas() const { return static_cast<std::size_t>(w.rows()); }
};

} // namespace rhs
