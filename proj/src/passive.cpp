// SPDX-License-Identifier: Apache-2.0

#include "rhs/passive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rhs::passive {

namespace {

void check_user_vectors(const RVec &chi, const RVec &weights, const RVec &d_sums,
                        Eigen::Index K, const char *where) {
  if (chi.size() != K || weights.size() != K || d_sums.size() != K)
    throw DomainError(std::string(where) + ": per-user vectors must have length K");
  if (!(d_sums.array() > 0.0).all())
    throw DomainError(std::string(where) + ": distance sums must be positive");
}

RVec amplitude(const RVec &chi, const RVec &weights) {
  return (weights.array() * (1.0 + chi.array())).sqrt().matrix();
}

constexpr double kTiny = std::numeric_limits<double>::min();

// A quadratic penalty leaves a residual shortfall that shrinks like 1/rho but
// never vanishes, so the penalty aims slightly above the real threshold.
constexpr double kPenaltyMargin = 1.01;

// Unpenalized objective plus the min-power penalty, sharing one evaluation
// of the per-link received powers.
class PenalizedObjective {
public:
  PenalizedObjective(const QuadraticForm &form, const std::optional<MinPowerConstraint> &c,
                     double scale)
      : form_(form), constraint_(c), scale_(scale) {
    if (constraint_) {
      surfaces_ = constraint_->surfaces;
      block_ = form_.dim() / static_cast<Eigen::Index>(surfaces_);
    }
  }

  void set_penalty(double rho) { rho_ = rho; }
  bool penalized() const { return constraint_ && rho_ > 0.0 && constraint_->threshold > 0.0; }

  double value(const CVec &theta) const {
    double f = form_.objective(theta);
    if (!penalized())
      return f;
    const double thr = kPenaltyMargin * constraint_->threshold;
    const double lift = thr - constraint_->threshold;
    double pen = 0.0;
    const auto sf = constraint_->shortfall(theta, form_.v_stacks);
    for (Eigen::Index i = 0; i < sf.size(); ++i) {
      const double x = std::max(sf.data()[i] + lift, 0.0) / thr;
      pen += x * x;
    }
    return f - rho_ * scale_ * pen;
  }

  CVec gradient(const CVec &theta) const {
    CVec g = form_.gradient(theta);
    if (!penalized())
      return g;
    const double thr = kPenaltyMargin * constraint_->threshold;
    const Eigen::Index K = form_.v_stacks.cols();
    for (std::size_t s = 0; s < surfaces_; ++s) {
      const Eigen::Index off = static_cast<Eigen::Index>(s) * block_;
      const auto th = theta.segment(off, block_);
      for (Eigen::Index k = 0; k < K; ++k) {
        const auto v = form_.v_stacks.col(k).segment(off, block_);
        const double d = constraint_->d_factors(static_cast<Eigen::Index>(s), k);
        const Complex u = th.dot(v);
        const double shortfall = thr - std::norm(u) / (d * d);
        if (shortfall <= 0.0)
          continue;
        // d/dtheta of -(shortfall/thr)^2 = 2 (shortfall/thr^2) grad P.
        const Complex coeff = rho_ * scale_ * 2.0 * shortfall / (thr * thr) * 2.0 *
                              std::conj(u) / (d * d);
        g.segment(off, block_) += coeff * v;
      }
    }
    return g;
  }

  // Rough curvature bound of the penalty term for the initial step length.
  double penalty_curvature() const {
    if (!penalized())
      return 0.0;
    const double thr = kPenaltyMargin * constraint_->threshold;
    double total = 0.0;
    for (std::size_t s = 0; s < surfaces_; ++s) {
      const Eigen::Index off = static_cast<Eigen::Index>(s) * block_;
      for (Eigen::Index k = 0; k < form_.v_stacks.cols(); ++k) {
        const auto v = form_.v_stacks.col(k).segment(off, block_);
        const double d2 = std::pow(constraint_->d_factors(static_cast<Eigen::Index>(s), k), 2);
        const double l1 = v.cwiseAbs().sum();
        total += 4.0 * v.squaredNorm() / (d2 * thr) * (1.0 + 2.0 * l1 * l1 / (d2 * thr));
      }
    }
    return rho_ * scale_ * total;
  }

private:
  const QuadraticForm &form_;
  const std::optional<MinPowerConstraint> &constraint_;
  double scale_;
  double rho_ = 0.0;
  std::size_t surfaces_ = 0;
  Eigen::Index block_ = 0;
};

} // namespace

CVec build_v(const channel::ChannelSet &channels, const shapes::ShapeMask &mask,
             const Precoder &precoder, std::size_t s, std::size_t k, double eta) {
  if (s >= channels.surfaces() || k >= channels.users())
    throw DomainError("build_v: surface or user index out of range");
  if (mask.elements() != channels.m_elems)
    throw DomainError("build_v: mask does not match the element count");
  if (precoder.antennas() != channels.n_tr || k >= precoder.users())
    throw DomainError("build_v: precoder does not match channels");
  const CVec hw = channels.h_ap_rhs[s] * precoder.w.col(static_cast<Eigen::Index>(k));
  const CVec &g = channels.g_rhs_ue[s][k];
  const double scale = std::sqrt(eta);
  CVec v(hw.size());
  for (Eigen::Index m = 0; m < hw.size(); ++m)
    v[m] = mask.active[static_cast<std::size_t>(m)] ? scale * std::conj(g[m]) * hw[m]
                                                    : Complex(0.0);
  return v;
}

CMat build_v_stacks(const channel::ChannelSet &channels, shapes::MaskView masks,
                    const Precoder &precoder, double eta) {
  const std::size_t S = channels.surfaces(), K = channels.users();
  const auto M = static_cast<Eigen::Index>(channels.m_elems);
  CMat out(static_cast<Eigen::Index>(S) * M, static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t k = 0; k < K; ++k)
      out.col(static_cast<Eigen::Index>(k)).segment(static_cast<Eigen::Index>(s) * M, M) =
          build_v(channels, masks[s], precoder, s, k, eta);
  return out;
}

CVec update_epsilon(const CVec &theta_stack, const CMat &v_stacks, const RVec &d_sums,
                    const RVec &chi, const RVec &weights, double noise_power) {
  const Eigen::Index K = v_stacks.cols();
  check_user_vectors(chi, weights, d_sums, K, "update_epsilon");
  if (theta_stack.size() != v_stacks.rows())
    throw DomainError("update_epsilon: stacked phase length does not match v");
  const RVec amp = amplitude(chi, weights);
  CVec eps(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Complex u = theta_stack.dot(v_stacks.col(k));
    eps[k] = amp[k] * u / (std::norm(u) + noise_power * d_sums[k] * d_sums[k]);
  }
  return eps;
}

double p5_objective(const CVec &theta_stack, const CMat &v_stacks, const RVec &d_sums,
                    const RVec &chi, const RVec &weights, double noise_power) {
  const Eigen::Index K = v_stacks.cols();
  check_user_vectors(chi, weights, d_sums, K, "p5_objective");
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double p = std::norm(theta_stack.dot(v_stacks.col(k)));
    total += weights[k] * (1.0 + chi[k]) * p / (p + noise_power * d_sums[k] * d_sums[k]);
  }
  return total;
}

double p6_objective(const CVec &epsilon, const CVec &theta_stack, const CMat &v_stacks,
                    const RVec &d_sums, const RVec &chi, const RVec &weights,
                    double noise_power) {
  const Eigen::Index K = v_stacks.cols();
  check_user_vectors(chi, weights, d_sums, K, "p6_objective");
  const RVec amp = amplitude(chi, weights);
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const Complex u = theta_stack.dot(v_stacks.col(k));
    total += 2.0 * amp[k] * std::real(std::conj(epsilon[k]) * u) -
             std::norm(epsilon[k]) * (std::norm(u) + noise_power * d_sums[k] * d_sums[k]);
  }
  return total;
}

void QuadraticForm::validate() const {
  if (factor_weights.size() != v_stacks.cols() || z.size() != v_stacks.rows())
    throw DomainError("QuadraticForm: inconsistent dimensions");
  if (factor_weights.size() > 0 && factor_weights.minCoeff() < -1e-10)
    throw NumericError("QuadraticForm: Upsilon is not positive semidefinite");
}

CMat QuadraticForm::upsilon() const {
  return v_stacks * factor_weights.cwiseMax(0.0).asDiagonal() * v_stacks.adjoint();
}

CVec QuadraticForm::apply_upsilon(const CVec &theta) const {
  const CVec u = v_stacks.adjoint() * theta;
  return v_stacks * (factor_weights.cwiseMax(0.0).cast<Complex>().asDiagonal() * u);
}

double QuadraticForm::lambda_max() const {
  if (v_stacks.cols() == 0)
    return 0.0;
  const RVec root = factor_weights.cwiseMax(0.0).cwiseSqrt();
  const CMat gram = root.cast<Complex>().asDiagonal() * (v_stacks.adjoint() * v_stacks) *
                    root.cast<Complex>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<CMat> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

double QuadraticForm::objective(const CVec &theta) const {
  const CVec u = v_stacks.adjoint() * theta;
  double quad = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k)
    quad += std::max(factor_weights[k], 0.0) * std::norm(u[k]);
  return -quad + 2.0 * std::real(theta.dot(z));
}

CVec QuadraticForm::gradient(const CVec &theta) const {
  return 2.0 * (z - apply_upsilon(theta));
}

QuadraticForm assemble_quadratic(const CVec &epsilon, const RVec &chi, const RVec &weights,
                                 const CMat &v_stacks, const RVec &d_sums) {
  const Eigen::Index K = v_stacks.cols();
  check_user_vectors(chi, weights, d_sums, K, "assemble_quadratic");
  if (epsilon.size() != K)
    throw DomainError("assemble_quadratic: epsilon must have length K");
  const RVec amp = amplitude(chi, weights);
  QuadraticForm form;
  form.v_stacks = v_stacks;
  form.factor_weights = epsilon.cwiseAbs2();
  form.z = CVec::Zero(v_stacks.rows());
  for (Eigen::Index k = 0; k < K; ++k)
    form.z += std::conj(epsilon[k]) * amp[k] * v_stacks.col(k);
  form.d_sums = d_sums;
  return form;
}

Eigen::MatrixXd MinPowerConstraint::shortfall(const CVec &theta_stack,
                                              const CMat &v_stacks) const {
  const Eigen::Index K = v_stacks.cols();
  const auto S = static_cast<Eigen::Index>(surfaces);
  if (S == 0 || v_stacks.rows() % S != 0 || d_factors.rows() != S || d_factors.cols() != K)
    throw DomainError("MinPowerConstraint: inconsistent dimensions");
  const Eigen::Index M = v_stacks.rows() / S;
  Eigen::MatrixXd out(S, K);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index k = 0; k < K; ++k) {
      const Complex u = theta_stack.segment(s * M, M).dot(v_stacks.col(k).segment(s * M, M));
      out(s, k) = threshold - std::norm(u) / (d_factors(s, k) * d_factors(s, k));
    }
  return out;
}

CVec project_unit_modulus(const CVec &x, const CVec &fallback) {
  CVec out(x.size());
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    const double r = std::abs(x[m]);
    out[m] = r > 0.0 && std::isfinite(r) ? x[m] / r : fallback[m];
  }
  return out;
}

SolverResult solve_unit_modulus_qp(const QuadraticForm &form, const PhaseConfig &theta_init,
                                   const std::optional<MinPowerConstraint> &min_power,
                                   const SolverOptions &options) {
  form.validate();
  theta_init.validate();
  const CVec theta0 = theta_init.stacked();
  if (theta0.size() != form.dim())
    throw DomainError("solve_unit_modulus_qp: initial phases do not match the quadratic form");
  if (theta_init.max_modulus_error() > 1e-9)
    throw DomainError("solve_unit_modulus_qp: initial phases are not unit modulus");
  if (min_power && min_power->surfaces != theta_init.surfaces())
    throw DomainError("solve_unit_modulus_qp: constraint surface count mismatch");

  const double lambda = form.lambda_max();
  const double f0 = form.objective(theta0);
  const double scale =
      std::max({std::abs(f0), 2.0 * form.z.cwiseAbs().sum(), lambda * static_cast<double>(form.dim()), kTiny});

  SolverResult result;
  result.initial_objective = f0;

  PenalizedObjective objective(form, min_power, scale);
  const bool constrained = min_power && min_power->threshold > 0.0;
  const std::size_t rounds = constrained ? std::max<std::size_t>(options.penalty_rounds, 1) : 1;

  CVec theta = theta0;
  CVec chosen = theta0;
  double chosen_f = f0;
  for (std::size_t round = 0; round < rounds; ++round) {
    const double rho =
        round == 0 ? 0.0
                   : options.penalty_initial * std::pow(options.penalty_growth, static_cast<double>(round - 1));
    objective.set_penalty(rho);

    double curvature = lambda + objective.penalty_curvature();
    if (!(curvature > 0.0))
      curvature = 1e-6 * std::max(form.z.cwiseAbs().maxCoeff(), kTiny);
    double step = 1.0 / curvature;

    std::vector<double> trace;
    double value = objective.value(theta);
    if (options.record_history)
      trace.push_back(value);
    for (std::size_t it = 0; it < options.max_iters; ++it) {
      const CVec grad = objective.gradient(theta);
      bool accepted = false;
      CVec candidate;
      double candidate_value = value;
      for (std::size_t bt = 0; bt <= options.max_backtracks; ++bt) {
        candidate = project_unit_modulus(theta + step * grad, theta);
        candidate_value = objective.value(candidate);
        if (candidate_value >= value) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted)
        break;
      // The curvature bound is loose; let accepted steps grow back.
      step *= 2.0;
      ++result.iterations;
      const double change = std::abs(candidate_value - value);
      theta = std::move(candidate);
      value = candidate_value;
      if (options.record_history)
        trace.push_back(value);
      if (change <= options.tol * std::max(std::abs(value), kTiny))
        break;
    }
    if (options.record_history)
      result.history.push_back(std::move(trace));
    result.rounds = round + 1;

    // Keep the latest round that does not give back objective value.
    const double f = form.objective(theta);
    if (f >= f0) {
      chosen = theta;
      chosen_f = f;
      result.selected_round = round;
    }
    if (!constrained || (min_power->shortfall(theta, form.v_stacks).array() <= 0.0).all())
      break;
  }

  result.phases = PhaseConfig::from_stacked(chosen, theta_init.surfaces(), theta_init.eta);
  result.objective = chosen_f;
  if (min_power) {
    result.shortfall = min_power->shortfall(chosen, form.v_stacks);
    result.violations = static_cast<std::size_t>((result.shortfall.array() > 0.0).count());
  }
  return result;
}

} // namespace rhs::passive
