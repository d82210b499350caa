#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bwk {

// One pull's observation. Reward lies in [0,1], cost in [c_min, c_max].
struct Outcome {
  double reward = 0.0;
  double cost = 0.0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// K actions, budget B and the cost range every outcome respects.
struct InstanceParams {
  std::size_t num_arms = 1;
  double budget = 1.0;
  double c_min = 1.0;
  double c_max = 1.0;

  // Throws std::invalid_argument unless K >= 1, B > 0 and 0 < c_min <= c_max.
  void validate() const;

  // Throws std::invalid_argument if the outcome leaves [0,1] x [c_min,c_max].
  void check_outcome(const Outcome& outcome) const;

  // Largest number of rounds any strategy can complete, plus one.
  std::size_t horizon_cap() const;

  friend bool operator==(const InstanceParams&, const InstanceParams&) = default;
};

inline constexpr double kSimplexTolerance = 1e-9;

// A probability vector over arms. Construction validates the simplex
// invariant (entries >= 0, sum within 1e-9 of 1).
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> probs);

  static ProbVector point_mass(std::size_t num_arms, std::size_t arm);
  static ProbVector uniform(std::size_t num_arms);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> probs_;
};

struct RoundRecord {
  std::uint64_t t = 0;  // 1-based round index
  std::size_t arm = 0;
  ProbVector probs;
  Outcome outcome;
  double budget_after = 0.0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct AbortedPull {
  std::size_t arm = 0;
  Outcome outcome;

  friend bool operator==(const AbortedPull&, const AbortedPull&) = default;
};

enum class Termination { kBudgetExhausted, kHorizonCap };

const char* to_string(Termination termination);

struct RunTrace {
  double budget = 0.0;
  std::vector<RoundRecord> rounds;
  Termination terminated_by = Termination::kBudgetExhausted;
  std::optional<AbortedPull> aborted_pull;
  double total_reward = 0.0;
  double total_cost = 0.0;

  std::size_t tau() const { return rounds.size(); }

  // Completed pulls per arm.
  std::vector<std::size_t> pull_counts(std::size_t num_arms) const;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

// log(sum(exp(v))) with the max subtracted first. Entries may be -inf; the
// result is -inf iff every entry is. Throws on empty input.
double log_sum_exp(std::span<const double> log_values);

// Softmax of finite log-weights, computed in log domain.
ProbVector normalized_probs_from_log_weights(std::span<const double> log_weights);

}  // namespace bwk
