#include "bwk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bwk {

HindsightReport hindsight_fixed_arms(const AdversarialMatrixSpec& spec) {
  spec.validate();
  const auto& params = spec.params;
  HindsightReport report;
  report.arms.resize(params.num_arms);
  for (std::size_t arm = 0; arm < params.num_arms; ++arm) {
    FixedArmPlayout& play = report.arms[arm];
    double remaining = params.budget;
    std::size_t t = 1;
    while (remaining > 0.0) {
      if (t > spec.horizon) {
        if (remaining >= params.c_min) throw std::runtime_error("horizon too short");
        break;
      }
      const double c = spec.cost(t, arm);
      if (c > remaining) break;
      const double r = spec.reward(t, arm);
      remaining -= c;
      play.cost_sum += c;
      play.reward_sum += r;
      play.efficiency_sum += r / c;
      ++play.rounds;
      ++t;
    }
  }
  for (std::size_t arm = 1; arm < params.num_arms; ++arm) {
    if (report.arms[arm].reward_sum > report.arms[report.best_reward_arm].reward_sum)
      report.best_reward_arm = arm;
    if (report.arms[arm].efficiency_sum > report.arms[report.best_efficiency_arm].efficiency_sum)
      report.best_efficiency_arm = arm;
  }
  return report;
}

std::vector<ArmMeans> arm_means(const StochasticEnvSpec& spec) {
  std::vector<ArmMeans> out;
  out.reserve(spec.arms.size());
  for (const auto& arm : spec.arms) out.push_back({mean(arm.reward), mean(arm.cost)});
  return out;
}

namespace {

void check_means(std::span<const ArmMeans> means) {
  if (means.empty()) throw std::invalid_argument("no arms");
  for (const auto& m : means)
    if (!(m.rho > 0.0) || !(m.mu >= 0.0)) throw std::invalid_argument("arm means need rho > 0");
}

double weighted_sum(std::span<const ArmMeans> means, std::span<const std::size_t> counts,
                    double ArmMeans::*field) {
  double total = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i)
    total += static_cast<double>(counts[i]) * (means[i].*field);
  return total;
}

}  // namespace

std::vector<std::size_t> greedy_pull_counts(std::span<const ArmMeans> means, double budget) {
  check_means(means);
  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return means[a].mu / means[a].rho > means[b].mu / means[b].rho;
  });
  std::vector<std::size_t> counts(means.size(), 0);
  double remaining = budget;
  for (std::size_t arm : order) {
    const double rho = means[arm].rho;
    while (rho <= remaining) {
      remaining -= rho;
      ++counts[arm];
    }
  }
  return counts;
}

double greedy_oracle_gain(std::span<const ArmMeans> means, double budget) {
  const auto counts = greedy_pull_counts(means, budget);
  return weighted_sum(means, counts, &ArmMeans::mu);
}

double brute_force_optimal_gain(std::span<const ArmMeans> means, double budget,
                                std::size_t pull_cap) {
  check_means(means);
  // Multisets of at most pull_cap pulls over K arms: C(pull_cap + K, K).
  double states = 1.0;
  for (std::size_t j = 1; j <= means.size(); ++j)
    states = states * static_cast<double>(pull_cap + j) / static_cast<double>(j);
  if (states > kBruteForceStateLimit) throw std::invalid_argument("instance too big for oracle");

  std::vector<std::size_t> counts(means.size(), 0);
  double best = 0.0;
  auto recurse = [&](auto&& self, std::size_t arm, std::size_t pulls_left) -> void {
    if (arm == means.size()) {
      if (weighted_sum(means, counts, &ArmMeans::rho) <= budget)
        best = std::max(best, weighted_sum(means, counts, &ArmMeans::mu));
      return;
    }
    for (std::size_t n = 0; n <= pulls_left; ++n) {
      counts[arm] = n;
      if (static_cast<double>(n) * means[arm].rho > budget) break;
      self(self, arm + 1, pulls_left - n);
    }
    counts[arm] = 0;
  };
  recurse(recurse, 0, pull_cap);
  return best;
}

double brute_force_optimal_gain(std::span<const ArmMeans> means, double budget) {
  check_means(means);
  double min_rho = means.front().rho;
  for (const auto& m : means) min_rho = std::min(min_rho, m.rho);
  return brute_force_optimal_gain(means, budget,
                                  static_cast<std::size_t>(std::floor(budget / min_rho)));
}

namespace {

std::vector<double> efficiency_gaps(const StochasticEnvSpec& spec) {
  const std::size_t k = spec.arms.size();
  std::vector<double> e(k);
  for (std::size_t i = 0; i < k; ++i) e[i] = true_efficiency(spec, i);
  const double best = *std::max_element(e.begin(), e.end());
  for (double& x : e) x = best - x;
  return e;
}

}  // namespace

double stochastic_pseudo_regret(const RunTrace& trace, const StochasticEnvSpec& spec) {
  const auto gaps = efficiency_gaps(spec);
  const auto counts = trace.pull_counts(spec.arms.size());
  double total = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) total += gaps[i] * static_cast<double>(counts[i]);
  return total;
}

const char* to_string(RegretMode mode) {
  return mode == RegretMode::kStochastic ? "STOCHASTIC" : "ADVERSARIAL";
}

RegretReport stochastic_regret(const RunTrace& trace, const StochasticEnvSpec& spec) {
  RegretReport r;
  r.mode = RegretMode::kStochastic;
  r.pseudo_regret = stochastic_pseudo_regret(trace, spec);
  r.mean = r.pseudo_regret;
  return r;
}

RegretReport adversarial_regret(const RunTrace& trace, const AdversarialMatrixSpec& spec) {
  return adversarial_regret(trace, spec, hindsight_fixed_arms(spec));
}

RegretReport adversarial_regret(const RunTrace& trace, const AdversarialMatrixSpec& spec,
                                const HindsightReport& hindsight) {
  if (trace.tau() == 0) throw std::invalid_argument("empty trace");
  const auto& best = hindsight.arms.at(hindsight.best_efficiency_arm);
  double achieved_efficiency = 0.0;
  for (const auto& round : trace.rounds) achieved_efficiency += round.outcome.reward / round.outcome.cost;

  RegretReport r;
  r.mode = RegretMode::kAdversarial;
  r.reward_sum_regret = hindsight.arms.at(hindsight.best_reward_arm).reward_sum - trace.total_reward;
  const double per_round_best =
      best.rounds > 0 ? spec.params.budget / static_cast<double>(best.rounds) : 0.0;
  r.z_value = std::max(per_round_best, trace.total_cost / static_cast<double>(trace.tau()));
  r.efficiency_regret = r.z_value * (best.efficiency_sum - achieved_efficiency);
  r.mean = r.reward_sum_regret;
  return r;
}

RegretReport aggregate_regret(std::span<const RegretReport> reports) {
  if (reports.empty()) throw std::invalid_argument("no regret reports to aggregate");
  const RegretMode mode = reports.front().mode;
  for (const auto& r : reports)
    if (r.mode != mode) throw std::invalid_argument("cannot aggregate mixed-mode reports");

  const double n = static_cast<double>(reports.size());
  RegretReport out;
  out.mode = mode;
  out.n_episodes = reports.size();
  for (const auto& r : reports) {
    out.pseudo_regret += r.pseudo_regret / n;
    out.reward_sum_regret += r.reward_sum_regret / n;
    out.efficiency_regret += r.efficiency_regret / n;
    out.z_value = std::max(out.z_value, r.z_value);
    out.mean += r.primary();
  }
  out.mean /= n;
  if (reports.size() > 1) {
    double ss = 0.0;
    for (const auto& r : reports) ss += (r.primary() - out.mean) * (r.primary() - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::size_t stopping_time_gap(const RunTrace& trace, const HindsightReport& hindsight) {
  const std::size_t t_best = hindsight.arms.at(hindsight.best_efficiency_arm).rounds;
  const std::size_t tau = trace.tau();
  return t_best > tau ? t_best - tau : tau - t_best;
}

}  // namespace bwk
