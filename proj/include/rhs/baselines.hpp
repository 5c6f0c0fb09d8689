// SPDX-License-Identifier: Apache-2.0
//
// Comparison schemes: AO on a fixed shape, AO on a fixed shape with b-bit
// phases, and zero-forcing precoding with random phases.

#pragma once

#include "rhs/active.hpp"
#include "rhs/ao.hpp"

#include <string>
#include <variant>

namespace rhs::baselines {

struct FixedShape {
  std::size_t mask_index = 0;
};
struct Quantized {
  unsigned bits = 2;
  std::size_t mask_index = 0;
};
struct ZfRandom {
  std::size_t mask_index = 0;
};

using BaselineKind = std::variant<FixedShape, Quantized, ZfRandom>;

/// Nearest point of {2 pi t / 2^bits}; ties resolve to the smaller angle.
PhaseConfig quantize_phases(const PhaseConfig &phases, unsigned bits);

/// W = B^H (B B^H)^-1 with unit-norm columns scaled to p_max / K each.
/// Throws NumericError when B is rank deficient or K > N_tr.
Precoder zf_precoder(const active::EffectiveChannels &eff, const RVec &weights, double p_max);

ao::AOSolution run_baseline(const BaselineKind &kind, const channel::ChannelSet &channels,
                            const shapes::ShapeCatalog &catalog, const ao::AOConfig &config);

} // namespace rhs::baselines
