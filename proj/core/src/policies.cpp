#include "bwk/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bwk {

// ---------------------------------------------------------------------------
// Policy

Policy::Policy(const InstanceParams& params) : params_(params), remaining_budget_(params.budget) {
  params_.validate();
}

Selection Policy::select(RngStream& rng) {
  if (terminated_) throw std::logic_error("episode over");
  Selection s = do_select(rng);
  if (s.probs.size() != params_.num_arms || s.arm >= params_.num_arms)
    throw std::logic_error("policy produced a malformed selection");
  return s;
}

StepStatus Policy::update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) {
  if (terminated_) throw std::logic_error("episode over");
  if (arm >= params_.num_arms) throw std::out_of_range("arm index out of range");
  if (probs.size() != params_.num_arms)
    throw std::invalid_argument("probability vector has wrong length");
  if (!(probs[arm] > 0.0)) throw std::invalid_argument("impossible selection");
  params_.check_outcome(outcome);

  if (outcome.cost > remaining_budget_) {
    terminated_ = true;
    aborted_pull_ = AbortedPull{arm, outcome};
    return StepStatus::kAborted;
  }
  remaining_budget_ -= outcome.cost;
  ++rounds_completed_;
  do_update(arm, probs, outcome);
  if (remaining_budget_ <= 0.0) terminated_ = true;
  return StepStatus::kAccepted;
}

// ---------------------------------------------------------------------------
// EXP3.BwK

namespace {

double gamma_from_denominator(const InstanceParams& params, double denominator) {
  params.validate();
  if (params.num_arms == 1) return 0.0;
  const double k = static_cast<double>(params.num_arms);
  return std::min(1.0, std::sqrt(params.c_min * k * std::log(k) / denominator));
}

}  // namespace

double exp3bwk_default_gamma(const InstanceParams& params) {
  constexpr double e = std::numbers::e;
  const double k = static_cast<double>(params.num_arms);
  return gamma_from_denominator(params, params.budget * (e - 1.0) + k * (e - 2.0));
}

double exp3bwk_statement_gamma(const InstanceParams& params) {
  return gamma_from_denominator(params, params.budget * (std::numbers::e - 1.0));
}

Exp3Bwk::Exp3Bwk(const InstanceParams& params, std::optional<double> gamma_override)
    : Policy(params), log_weights_(params.num_arms, 0.0) {
  if (gamma_override) {
    if (!(*gamma_override > 0.0 && *gamma_override <= 1.0))
      throw std::invalid_argument("gamma must lie in (0, 1]");
    gamma_ = *gamma_override;
  } else {
    gamma_ = exp3bwk_default_gamma(params);
  }
}

ProbVector exp3bwk_probabilities(std::span<const double> log_weights, double gamma) {
  const ProbVector w = normalized_probs_from_log_weights(log_weights);
  const double floor = gamma / static_cast<double>(log_weights.size());
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - gamma) * w[i] + floor;
  return ProbVector(std::move(p));
}

ProbVector Exp3Bwk::probabilities() const { return exp3bwk_probabilities(log_weights_, gamma_); }

Selection Exp3Bwk::do_select(RngStream& rng) {
  ProbVector p = probabilities();
  const std::size_t arm = rng.sample(p);
  return {arm, std::move(p)};
}

void Exp3Bwk::do_update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) {
  last_estimate_ = outcome.reward / (probs[arm] * outcome.cost);
  last_increment_ =
      gamma_ * params().c_min * last_estimate_ / static_cast<double>(log_weights_.size());
  log_weights_[arm] += last_increment_;
}

// ---------------------------------------------------------------------------
// EXP3++.BwK

double exp3pp_eta(double alpha, std::size_t num_arms, double t, std::uint64_t pulls) {
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  const double log_term =
      std::log(static_cast<double>(num_arms)) / alpha + std::log(t);
  return std::sqrt(alpha * log_term / (2.0 * static_cast<double>(pulls)));
}

ConfidenceBounds exp3pp_confidence_bounds(std::span<const double> empirical_efficiency,
                                          std::span<const std::uint64_t> pulls, double t,
                                          double alpha, double lambda, double c_min) {
  if (empirical_efficiency.size() != pulls.size())
    throw std::invalid_argument("efficiency and pull-count arrays differ in length");
  const std::size_t k = pulls.size();
  const double upper_cap = 1.0 / c_min;
  ConfidenceBounds out{std::vector<double>(k), std::vector<double>(k)};
  for (std::size_t i = 0; i < k; ++i) {
    const double eta = exp3pp_eta(alpha, k, t, pulls[i]);
    if (!(eta < lambda)) {
      out.ucb[i] = upper_cap;
      out.lcb[i] = 0.0;
      continue;
    }
    const double radius = (1.0 + 1.0 / lambda) * eta / (lambda - eta);
    out.ucb[i] = std::min(upper_cap, empirical_efficiency[i] + radius);
    out.lcb[i] = std::max(0.0, empirical_efficiency[i] - radius);
  }
  return out;
}

std::vector<double> exp3pp_gap_estimates(std::span<const double> ucb, std::span<const double> lcb) {
  if (ucb.size() != lcb.size()) throw std::invalid_argument("ucb and lcb differ in length");
  const std::size_t k = ucb.size();
  std::vector<double> gaps(k, 0.0);
  if (k < 2) return gaps;
  // Best and runner-up LCB give max_{j != i} in O(K).
  std::size_t best = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (lcb[j] > lcb[best]) best = j;
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j)
    if (j != best) second = std::max(second, lcb[j]);
  for (std::size_t i = 0; i < k; ++i) {
    const double other = (i == best) ? second : lcb[best];
    gaps[i] = std::max(0.0, other - ucb[i]);
  }
  return gaps;
}

double exp3pp_learning_rate(std::uint64_t t, std::size_t num_arms, double c_min) {
  const double k = static_cast<double>(num_arms);
  return 0.5 * c_min * std::sqrt(std::log(k) / (static_cast<double>(t) * k));
}

std::vector<double> exp3pp_exploration(std::span<const double> gaps, std::uint64_t t, double beta) {
  const double k = static_cast<double>(gaps.size());
  const double td = static_cast<double>(t);
  const double cap = std::min(1.0 / (2.0 * k), 0.5 * std::sqrt(std::log(k) / td));
  std::vector<double> eps(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double e = cap;
    if (gaps[i] > 0.0) e = std::min(e, beta * std::log(td) / (td * gaps[i] * gaps[i]));
    eps[i] = e;
  }
  return eps;
}

ProbVector exp3pp_mix(const ProbVector& base, std::span<const double> exploration) {
  if (exploration.size() != base.size())
    throw std::invalid_argument("exploration vector has wrong length");
  const double total = std::accumulate(exploration.begin(), exploration.end(), 0.0);
  std::vector<double> p(base.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - total) * base[i] + exploration[i];
  return ProbVector(std::move(p));
}

Exp3PlusPlusBwk::Exp3PlusPlusBwk(const InstanceParams& params, const Exp3PPOptions& options)
    : Policy(params),
      alpha_(options.alpha),
      beta_(options.beta.value_or(256.0 / (params.c_min * params.c_min))),
      lambda_(options.lambda.value_or(params.c_min)),
      cum_loss_(params.num_arms, 0.0),
      pulls_(params.num_arms, 0),
      reward_sum_(params.num_arms, 0.0),
      cost_sum_(params.num_arms, 0.0) {
  if (params.budget < static_cast<double>(params.num_arms) * params.c_max)
    throw std::invalid_argument("budget cannot cover initialization sweep");
  if (!(alpha_ >= 3.0) || !std::isfinite(alpha_)) throw std::invalid_argument("alpha must be >= 3");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw std::invalid_argument("beta must be positive");
  if (!(lambda_ > 0.0 && lambda_ <= params.c_min))
    throw std::invalid_argument("lambda must lie in (0, c_min]");
}

std::vector<double> Exp3PlusPlusBwk::empirical_efficiency() const {
  std::vector<double> e(pulls_.size(), 0.0);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (pulls_[i] > 0) e[i] = reward_sum_[i] / cost_sum_[i];
  return e;
}

ConfidenceBounds Exp3PlusPlusBwk::confidence_bounds() const {
  if (phase_ != Phase::kMain) throw std::logic_error("confidence bounds need the main phase");
  return exp3pp_confidence_bounds(empirical_efficiency(), pulls_,
                                  static_cast<double>(rounds_completed() + 1), alpha_,
                                  lambda_, params().c_min);
}

Selection Exp3PlusPlusBwk::do_select(RngStream& rng) {
  const std::size_t k = params().num_arms;
  if (phase_ == Phase::kInitSweep) {
    const auto arm = static_cast<std::size_t>(rounds_completed());
    return {arm, ProbVector::point_mass(k, arm)};
  }

  Diagnostics d;
  d.t = rounds_completed() + 1;
  d.bounds = confidence_bounds();
  d.gaps = exp3pp_gap_estimates(d.bounds.ucb, d.bounds.lcb);
  d.exploration = exp3pp_exploration(d.gaps, d.t, beta_);
  d.learning_rate = exp3pp_learning_rate(d.t, k, params().c_min);

  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) scaled[i] = -d.learning_rate * cum_loss_[i];
  const ProbVector base = normalized_probs_from_log_weights(scaled);
  d.base_probs.assign(base.values().begin(), base.values().end());

  ProbVector mixed = exp3pp_mix(base, d.exploration);
  diagnostics_ = std::move(d);
  const std::size_t arm = rng.sample(mixed);
  return {arm, std::move(mixed)};
}

void Exp3PlusPlusBwk::do_update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) {
  ++pulls_[arm];
  reward_sum_[arm] += outcome.reward;
  cost_sum_[arm] += outcome.cost;
  if (phase_ == Phase::kInitSweep) {
    if (rounds_completed() == params().num_arms) phase_ = Phase::kMain;
    return;
  }
  const double p = probs[arm];
  const double estimate = outcome.reward / (p * outcome.cost);
  last_loss_ = 1.0 / (params().c_min * p) - estimate;
  cum_loss_[arm] += last_loss_;
}

// ---------------------------------------------------------------------------
// Baselines

FixedArmPolicy::FixedArmPolicy(const InstanceParams& params, std::size_t arm)
    : Policy(params), arm_(arm) {
  if (arm >= params.num_arms) throw std::out_of_range("fixed arm index out of range");
}

Selection FixedArmPolicy::do_select(RngStream&) {
  return {arm_, ProbVector::point_mass(params().num_arms, arm_)};
}

Selection UniformPolicy::do_select(RngStream& rng) {
  const std::size_t k = params().num_arms;
  return {rng.uniform_index(k), ProbVector::uniform(k)};
}

}  // namespace bwk
