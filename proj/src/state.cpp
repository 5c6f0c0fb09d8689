// SPDX-License-Identifier: Apache-2.0

#include "rhs/state.hpp"

#include <cmath>
#include <numbers>

namespace rhs {

CVec PhaseConfig::stacked() const {
  const std::size_t M = elements();
  CVec out(static_cast<Eigen::Index>(surfaces() * M));
  for (std::size_t s = 0; s < surfaces(); ++s)
    out.segment(static_cast<Eigen::Index>(s * M), static_cast<Eigen::Index>(M)) = theta[s];
  return out;
}

PhaseConfig PhaseConfig::from_stacked(const CVec &stack, std::size_t surfaces, double eta) {
  if (surfaces == 0 || stack.size() % static_cast<Eigen::Index>(surfaces) != 0)
    throw DomainError("PhaseConfig: stacked length not divisible by surface count");
  const Eigen::Index M = stack.size() / static_cast<Eigen::Index>(surfaces);
  PhaseConfig out;
  out.eta = eta;
  for (std::size_t s = 0; s < surfaces; ++s)
    out.theta.push_back(stack.segment(static_cast<Eigen::Index>(s) * M, M));
  return out;
}

PhaseConfig PhaseConfig::random(std::size_t surfaces, std::size_t elements,
                                std::mt19937_64 &rng, double eta) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  PhaseConfig out;
  out.eta = eta;
  for (std::size_t s = 0; s < surfaces; ++s) {
    CVec t(static_cast<Eigen::Index>(elements));
    for (auto &x : t)
      x = std::polar(1.0, phase(rng));
    out.theta.push_back(std::move(t));
  }
  return out;
}

PhaseConfig PhaseConfig::constant(std::size_t surfaces, std::size_t elements, Complex value,
                                  double eta) {
  PhaseConfig out;
  out.eta = eta;
  out.theta.assign(surfaces, CVec::Constant(static_cast<Eigen::Index>(elements), value));
  return out;
}

double PhaseConfig::max_modulus_error() const {
  double worst = 0.0;
  for (const auto &t : theta)
    for (const auto &x : t)
      worst = std::max(worst, std::abs(std::abs(x) - 1.0));
  return worst;
}

void PhaseConfig::validate() const {
  if (!(eta > 0.0 && eta <= 1.0))
    throw DomainError("PhaseConfig: reflection coefficient must lie in (0, 1]");
  for (const auto &t : theta)
    if (t.size() != theta.front().size())
      throw DomainError("PhaseConfig: surfaces have different element counts");
}

} // namespace rhs
