#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bwk/core.hpp"
#include "bwk/environments.hpp"

namespace bwk {

struct FixedArmPlayout {
  std::size_t rounds = 0;  // T(i)
  double reward_sum = 0.0;
  double efficiency_sum = 0.0;  // sum over t <= T(i) of r_t(i) / c_t(i)
  double cost_sum = 0.0;
};

struct HindsightReport {
  std::vector<FixedArmPlayout> arms;
  std::size_t best_reward_arm = 0;
  std::size_t best_efficiency_arm = 0;  // i* of the efficiency regret
};

// Plays every arm alone against the matrix until the next pull is
// unaffordable or the budget is spent. Throws "horizon too short" if the
// matrix ends while another minimum-cost pull would still fit.
HindsightReport hindsight_fixed_arms(const AdversarialMatrixSpec& spec);

struct ArmMeans {
  double mu = 0.0;
  double rho = 1.0;
};

std::vector<ArmMeans> arm_means(const StochasticEnvSpec& spec);

// Pull counts chosen by the greedy knapsack rule: arms in decreasing mu/rho
// (lowest index first on ties), each pulled while its cost still fits.
std::vector<std::size_t> greedy_pull_counts(std::span<const ArmMeans> means, double budget);
double greedy_oracle_gain(std::span<const ArmMeans> means, double budget);

// Exact optimum of the unbounded knapsack by enumerating pull multisets of
// at most `pull_cap` pulls. Throws "instance too big for oracle" when the
// multiset space exceeds kBruteForceStateLimit.
inline constexpr double kBruteForceStateLimit = 1e6;
double brute_force_optimal_gain(std::span<const ArmMeans> means, double budget,
                                std::size_t pull_cap);
// pull_cap = floor(B / min rho).
double brute_force_optimal_gain(std::span<const ArmMeans> means, double budget);

// Sum of gains weighted by completed pulls, with gaps taken against the
// highest-efficiency arm.
double stochastic_pseudo_regret(const RunTrace& trace, const StochasticEnvSpec& spec);

enum class RegretMode { kStochastic, kAdversarial };

const char* to_string(RegretMode mode);

struct RegretReport {
  RegretMode mode = RegretMode::kStochastic;
  double pseudo_regret = 0.0;
  double reward_sum_regret = 0.0;
  double efficiency_regret = 0.0;
  double z_value = 0.0;
  std::size_t n_episodes = 1;
  // Mean and standard error of the mode's primary figure: pseudo-regret in
  // stochastic mode, reward-sum regret in adversarial mode.
  double mean = 0.0;
  double standard_error = 0.0;

  double primary() const {
    return mode == RegretMode::kStochastic ? pseudo_regret : reward_sum_regret;
  }
};

RegretReport stochastic_regret(const RunTrace& trace, const StochasticEnvSpec& spec);

RegretReport adversarial_regret(const RunTrace& trace, const AdversarialMatrixSpec& spec);
RegretReport adversarial_regret(const RunTrace& trace, const AdversarialMatrixSpec& spec,
                                const HindsightReport& hindsight);

// Mean and standard error (sample std / sqrt(n)) across episodes; the other
// numeric fields become their averages.
RegretReport aggregate_regret(std::span<const RegretReport> reports);

// |T(i*) - tau| for the efficiency-optimal fixed arm.
std::size_t stopping_time_gap(const RunTrace& trace, const HindsightReport& hindsight);

}  // namespace bwk
