#include "bwk/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bwk {

void InstanceParams::validate() const {
  if (num_arms < 1) throw std::invalid_argument("number of arms must be at least 1");
  if (!(budget > 0.0) || !std::isfinite(budget))
    throw std::invalid_argument("budget must be positive and finite");
  if (!(c_min > 0.0)) throw std::invalid_argument("c_min must be positive");
  if (!(c_max >= c_min) || !std::isfinite(c_max))
    throw std::invalid_argument("c_max must be finite and at least c_min");
}

void InstanceParams::check_outcome(const Outcome& outcome) const {
  if (!(outcome.reward >= 0.0 && outcome.reward <= 1.0))
    throw std::invalid_argument("reward " + std::to_string(outcome.reward) + " outside [0,1]");
  if (!(outcome.cost >= c_min && outcome.cost <= c_max))
    throw std::invalid_argument("cost " + std::to_string(outcome.cost) +
                                " outside [c_min, c_max]");
}

std::size_t InstanceParams::horizon_cap() const {
  return static_cast<std::size_t>(std::ceil(budget / c_min)) + 1;
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("probability vector is empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("probability entry is negative or non-finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance)
    throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
}

ProbVector ProbVector::point_mass(std::size_t num_arms, std::size_t arm) {
  if (arm >= num_arms) throw std::out_of_range("arm index out of range");
  std::vector<double> p(num_arms, 0.0);
  p[arm] = 1.0;
  return ProbVector(std::move(p));
}

ProbVector ProbVector::uniform(std::size_t num_arms) {
  return ProbVector(std::vector<double>(num_arms, 1.0 / static_cast<double>(num_arms)));
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::kBudgetExhausted: return "BUDGET_EXHAUSTED";
    case Termination::kHorizonCap: return "HORIZON_CAP";
  }
  return "UNKNOWN";
}

std::vector<std::size_t> RunTrace::pull_counts(std::size_t num_arms) const {
  std::vector<std::size_t> counts(num_arms, 0);
  for (const auto& r : rounds) {
    if (r.arm >= num_arms) throw std::out_of_range("trace arm exceeds arm count");
    ++counts[r.arm];
  }
  return counts;
}

double log_sum_exp(std::span<const double> log_values) {
  if (log_values.empty()) throw std::invalid_argument("empty collection");
  const double max_value = *std::max_element(log_values.begin(), log_values.end());
  if (max_value == -std::numeric_limits<double>::infinity()) return max_value;
  double acc = 0.0;
  for (double v : log_values) acc += std::exp(v - max_value);
  return max_value + std::log(acc);
}

ProbVector normalized_probs_from_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("empty collection");
  for (double w : log_weights)
    if (!std::isfinite(w)) throw std::invalid_argument("invalid weight");
  const double log_total = log_sum_exp(log_weights);
  std::vector<double> p(log_weights.size());
  std::transform(log_weights.begin(), log_weights.end(), p.begin(),
                 [log_total](double w) { return std::exp(w - log_total); });
  // Renormalize the few ulps of drift left by exp().
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= sum;
  return ProbVector(std::move(p));
}

}  // namespace bwk
