#include "bwk/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bwk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_distribution(const Distribution& dist) {
  std::visit(Overloaded{
                 [](const PointMass& d) {
                   if (!std::isfinite(d.value)) throw std::invalid_argument("point mass not finite");
                 },
                 [](const UniformInterval& d) {
                   if (!(d.low <= d.high) || !std::isfinite(d.low) || !std::isfinite(d.high))
                     throw std::invalid_argument("uniform interval needs low <= high");
                 },
                 [](const ScaledBernoulli& d) {
                   if (!(d.low <= d.high) || !std::isfinite(d.low) || !std::isfinite(d.high))
                     throw std::invalid_argument("scaled Bernoulli needs low <= high");
                   if (!(d.p >= 0.0 && d.p <= 1.0))
                     throw std::invalid_argument("Bernoulli probability outside [0,1]");
                 },
             },
             dist);
}

std::size_t ceil_rounds(const InstanceParams& params) {
  return static_cast<std::size_t>(std::ceil(params.budget / params.c_min));
}

}  // namespace

double mean(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const PointMass& d) { return d.value; },
                        [](const UniformInterval& d) { return 0.5 * (d.low + d.high); },
                        [](const ScaledBernoulli& d) { return d.low + d.p * (d.high - d.low); },
                    },
                    dist);
}

double support_min(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const PointMass& d) { return d.value; },
                        [](const UniformInterval& d) { return d.low; },
                        [](const ScaledBernoulli& d) { return d.p < 1.0 ? d.low : d.high; },
                    },
                    dist);
}

double support_max(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const PointMass& d) { return d.value; },
                        [](const UniformInterval& d) { return d.high; },
                        [](const ScaledBernoulli& d) { return d.p > 0.0 ? d.high : d.low; },
                    },
                    dist);
}

double draw(const Distribution& dist, RngStream& rng) {
  const double u = rng.uniform01();
  return std::visit(Overloaded{
                        [](const PointMass& d) { return d.value; },
                        [u](const UniformInterval& d) { return d.low + u * (d.high - d.low); },
                        [u](const ScaledBernoulli& d) { return u < d.p ? d.high : d.low; },
                    },
                    dist);
}

void StochasticEnvSpec::validate() const {
  params.validate();
  if (arms.size() != params.num_arms)
    throw std::invalid_argument("stochastic spec has " + std::to_string(arms.size()) +
                                " arms, expected " + std::to_string(params.num_arms));
  for (std::size_t i = 0; i < arms.size(); ++i) {
    check_distribution(arms[i].reward);
    check_distribution(arms[i].cost);
    if (support_min(arms[i].reward) < 0.0 || support_max(arms[i].reward) > 1.0)
      throw std::invalid_argument("arm " + std::to_string(i) + " reward support outside [0,1]");
    if (support_min(arms[i].cost) < params.c_min || support_max(arms[i].cost) > params.c_max)
      throw std::invalid_argument("arm " + std::to_string(i) +
                                  " cost support outside [c_min, c_max]");
  }
  if (planted_optimal_arm && *planted_optimal_arm >= params.num_arms)
    throw std::invalid_argument("planted optimal arm out of range");
}

double AdversarialMatrixSpec::reward(std::size_t t, std::size_t arm) const {
  if (t < 1 || t > horizon) throw std::out_of_range("round " + std::to_string(t) + " outside matrix");
  if (arm >= params.num_arms) throw std::out_of_range("arm index out of range");
  return rewards[(t - 1) * params.num_arms + arm];
}

double AdversarialMatrixSpec::cost(std::size_t t, std::size_t arm) const {
  if (t < 1 || t > horizon) throw std::out_of_range("round " + std::to_string(t) + " outside matrix");
  if (arm >= params.num_arms) throw std::out_of_range("arm index out of range");
  return costs[(t - 1) * params.num_arms + arm];
}

void AdversarialMatrixSpec::validate() const {
  params.validate();
  const std::size_t cells = horizon * params.num_arms;
  if (rewards.size() != cells || costs.size() != cells)
    throw std::invalid_argument("matrix dimensions do not match horizon x K");
  if (horizon < ceil_rounds(params))
    throw std::invalid_argument("horizon too short: matrix has " + std::to_string(horizon) +
                                " rounds, ceil(B / c_min) = " +
                                std::to_string(ceil_rounds(params)));
  for (std::size_t k = 0; k < cells; ++k) {
    params.check_outcome({rewards[k], costs[k]});
  }
  if (planted_optimal_arm && *planted_optimal_arm >= params.num_arms)
    throw std::invalid_argument("planted optimal arm out of range");
}

Outcome stochastic_step(const StochasticEnvSpec& spec, std::size_t arm, RngStream& rng) {
  if (arm >= spec.arms.size()) throw std::out_of_range("arm index out of range");
  Outcome out;
  out.reward = draw(spec.arms[arm].reward, rng);
  out.cost = draw(spec.arms[arm].cost, rng);
  return out;
}

Outcome adversarial_step(const AdversarialMatrixSpec& spec, std::size_t t, std::size_t arm) {
  return {spec.reward(t, arm), spec.cost(t, arm)};
}

double true_efficiency(const StochasticEnvSpec& spec, std::size_t arm) {
  if (arm >= spec.arms.size()) throw std::out_of_range("arm index out of range");
  return mean(spec.arms[arm].reward) / mean(spec.arms[arm].cost);
}

double thm2_epsilon(const InstanceParams& params) {
  return std::sqrt(static_cast<double>(params.num_arms) * params.c_min / params.budget);
}

StochasticEnvSpec build_thm2_adversary(const InstanceParams& params, RngStream& rng) {
  params.validate();
  if (params.c_max != 1.0) throw std::invalid_argument("planted instance requires c_max = 1");
  const double eps = thm2_epsilon(params);
  if (0.5 + eps > 1.0) throw std::invalid_argument("budget too small for planted instance");

  StochasticEnvSpec spec;
  spec.params = params;
  const std::size_t best = rng.uniform_index(params.num_arms);
  spec.planted_optimal_arm = best;
  spec.arms.reserve(params.num_arms);
  for (std::size_t i = 0; i < params.num_arms; ++i) {
    spec.arms.push_back({ScaledBernoulli{0.0, 1.0, i == best ? 0.5 + eps : 0.5},
                         PointMass{params.c_min}});
  }
  return spec;
}

std::size_t thm5_switch_round(double alpha, double budget) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  const double big_cost = std::pow(budget, alpha);
  if (big_cost < 1.0) throw std::invalid_argument("B^alpha must be at least 1");
  const double t_star = std::floor(budget - big_cost);
  if (t_star < 0.0) throw std::invalid_argument("B - B^alpha is negative");
  return static_cast<std::size_t>(t_star);
}

AdversarialMatrixSpec build_thm5_adversary(double alpha, double budget, std::size_t optimal_arm) {
  const std::size_t t_star = thm5_switch_round(alpha, budget);
  if (optimal_arm > 1) throw std::invalid_argument("switch instance has two arms");
  const double big_cost = std::pow(budget, alpha);

  AdversarialMatrixSpec spec;
  spec.params = InstanceParams{2, budget, 1.0, big_cost};
  spec.horizon = std::max<std::size_t>(ceil_rounds(spec.params), t_star + 1);
  spec.planted_optimal_arm = optimal_arm;
  spec.rewards.assign(spec.horizon * 2, 1.0);
  spec.costs.assign(spec.horizon * 2, 1.0);
  for (std::size_t t = 1; t <= t_star; ++t) {
    spec.rewards[(t - 1) * 2] = 0.0;
    spec.rewards[(t - 1) * 2 + 1] = 0.0;
  }
  const std::size_t other = 1 - optimal_arm;
  spec.rewards[t_star * 2 + other] = 0.0;
  spec.costs[t_star * 2 + other] = big_cost;
  spec.validate();
  return spec;
}

AdversarialMatrixSpec build_thm5_adversary(double alpha, double budget, RngStream& rng) {
  thm5_switch_round(alpha, budget);
  return build_thm5_adversary(alpha, budget, rng.uniform_index(2));
}

AdversarialMatrixSpec realize_matrix(const StochasticEnvSpec& spec, RngStream& rng,
                                     std::optional<std::size_t> horizon) {
  spec.validate();
  AdversarialMatrixSpec out;
  out.params = spec.params;
  out.horizon = horizon.value_or(ceil_rounds(spec.params));
  out.planted_optimal_arm = spec.planted_optimal_arm;
  const std::size_t k = spec.params.num_arms;
  out.rewards.resize(out.horizon * k);
  out.costs.resize(out.horizon * k);
  for (std::size_t t = 0; t < out.horizon; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const Outcome o = stochastic_step(spec, i, rng);
      out.rewards[t * k + i] = o.reward;
      out.costs[t * k + i] = o.cost;
    }
  }
  out.validate();
  return out;
}

}  // namespace bwk
