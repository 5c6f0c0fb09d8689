// SPDX-License-Identifier: Apache-2.0
//
// Random instances shared by the unit and acceptance tests.

#pragma once

#include "rhs/channel.hpp"
#include "rhs/shapes.hpp"
#include "rhs/state.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rhs::test {

inline CMat random_cmat(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng,
                        double variance = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      m(i, j) = {n(rng), n(rng)};
  return m;
}

inline CVec random_cvec(Eigen::Index n, std::mt19937_64 &rng, double variance = 1.0) {
  return random_cmat(n, 1, rng, variance).col(0);
}

inline RVec random_uniform(Eigen::Index n, std::mt19937_64 &rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  RVec v(n);
  for (auto &x : v)
    x = u(rng);
  return v;
}

/// Unit-variance Rayleigh channels with unit noise and d factors in [0.5, 2].
inline channel::ChannelSet random_channels(std::size_t S, std::size_t K, std::size_t M,
                                           std::size_t N, std::mt19937_64 &rng,
                                           double noise = 1.0) {
  channel::ChannelSet c;
  c.n_tr = N;
  c.m_elems = M;
  c.noise_power = noise;
  c.d_factors.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(K));
  std::uniform_real_distribution<double> d(0.5, 2.0);
  c.g_rhs_ue.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    c.h_ap_rhs.push_back(random_cmat(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N), rng));
    for (std::size_t k = 0; k < K; ++k) {
      c.g_rhs_ue[s].push_back(random_cvec(static_cast<Eigen::Index>(M), rng));
      c.d_factors(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = d(rng);
    }
  }
  return c;
}

inline shapes::ShapeMask random_mask(shapes::Grid grid, std::mt19937_64 &rng, std::string label) {
  std::bernoulli_distribution on(0.5);
  shapes::ShapeMask m;
  m.grid = grid;
  m.label = std::move(label);
  m.active.resize(grid.size());
  for (auto &a : m.active)
    a = on(rng) ? 1 : 0;
  return m;
}

inline Precoder random_precoder(std::size_t N, std::size_t K, std::mt19937_64 &rng,
                                double p_max = 1.0) {
  Precoder p;
  p.w = random_cmat(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K), rng);
  p.w *= std::sqrt(p_max) / p.w.norm();
  p.weights = RVec::Ones(static_cast<Eigen::Index>(K));
  p.p_max = p_max;
  return p;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace rhs::test
