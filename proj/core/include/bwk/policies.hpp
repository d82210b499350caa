#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwk/core.hpp"
#include "bwk/rng.hpp"

namespace bwk {

struct Selection {
  std::size_t arm = 0;
  ProbVector probs;
};

enum class StepStatus { kAccepted, kAborted };

// Select/update state machine shared by every budgeted policy. The base
// class owns the budget contract: a pull whose cost exceeds the remaining
// budget ends the episode without paying or collecting anything, and the
// episode also ends once the remaining budget reaches zero.
class Policy {
 public:
  explicit Policy(const InstanceParams& params);
  virtual ~Policy() = default;

  Policy(const Policy&) = default;
  Policy& operator=(const Policy&) = default;
  Policy(Policy&&) = default;
  Policy& operator=(Policy&&) = default;

  virtual std::string name() const = 0;

  // Throws std::logic_error("episode over") once terminated.
  Selection select(RngStream& rng);

  // `probs` must be the vector the arm was drawn from.
  StepStatus update(std::size_t arm, const ProbVector& probs, const Outcome& outcome);

  const InstanceParams& params() const { return params_; }
  bool terminated() const { return terminated_; }
  double remaining_budget() const { return remaining_budget_; }
  std::uint64_t rounds_completed() const { return rounds_completed_; }
  const std::optional<AbortedPull>& aborted_pull() const { return aborted_pull_; }

 protected:
  virtual Selection do_select(RngStream& rng) = 0;
  // Called after the cost has been paid and the round counted.
  virtual void do_update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) = 0;

 private:
  InstanceParams params_;
  double remaining_budget_;
  std::uint64_t rounds_completed_ = 0;
  bool terminated_ = false;
  std::optional<AbortedPull> aborted_pull_;
};

// ---------------------------------------------------------------------------
// EXP3.BwK

// Exploration rate sqrt(c_min K ln K / (B(e-1) + K(e-2))), clamped to 1.
// Zero for K = 1.
double exp3bwk_default_gamma(const InstanceParams& params);

// The variant with denominator B(e-1) only; kept for comparison.
double exp3bwk_statement_gamma(const InstanceParams& params);

// (1 - gamma) softmax(log_weights) + gamma / K.
ProbVector exp3bwk_probabilities(std::span<const double> log_weights, double gamma);

class Exp3Bwk final : public Policy {
 public:
  explicit Exp3Bwk(const InstanceParams& params, std::optional<double> gamma_override = {});

  std::string name() const override { return "EXP3_BWK"; }

  double gamma() const { return gamma_; }
  std::span<const double> log_weights() const { return log_weights_; }

  // (1 - gamma) w / W + gamma / K.
  ProbVector probabilities() const;

  // gamma c_min e_hat / K applied at the last accepted update.
  double last_log_weight_increment() const { return last_increment_; }
  double last_efficiency_estimate() const { return last_estimate_; }

 protected:
  Selection do_select(RngStream& rng) override;
  void do_update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) override;

 private:
  double gamma_;
  std::vector<double> log_weights_;
  double last_increment_ = 0.0;
  double last_estimate_ = 0.0;
};

// ---------------------------------------------------------------------------
// EXP3++.BwK

struct Exp3PPOptions {
  double alpha = 3.0;
  std::optional<double> beta;    // defaults to 256 / c_min^2
  std::optional<double> lambda;  // defaults to c_min
};

struct ConfidenceBounds {
  std::vector<double> ucb;
  std::vector<double> lcb;
};

// eta = sqrt(alpha ln(K^(1/alpha) t) / (2 N)).
double exp3pp_eta(double alpha, std::size_t num_arms, double t, std::uint64_t pulls);

// UCB/LCB on each arm's efficiency. Once eta >= lambda the radius is
// treated as infinite, so the bounds collapse to (1/c_min, 0).
ConfidenceBounds exp3pp_confidence_bounds(std::span<const double> empirical_efficiency,
                                          std::span<const std::uint64_t> pulls, double t,
                                          double alpha, double lambda, double c_min);

// max(0, max_{j != i} lcb_j - ucb_i); all zeros for K = 1.
std::vector<double> exp3pp_gap_estimates(std::span<const double> ucb, std::span<const double> lcb);

// 0.5 c_min sqrt(ln K / (t K)).
double exp3pp_learning_rate(std::uint64_t t, std::size_t num_arms, double c_min);

// min{1/(2K), 0.5 sqrt(ln K / t), beta ln t / (t gap^2)}, a zero gap
// contributing +inf to the min.
std::vector<double> exp3pp_exploration(std::span<const double> gaps, std::uint64_t t, double beta);

// (1 - sum_j eps_j) p_i + eps_i.
ProbVector exp3pp_mix(const ProbVector& base, std::span<const double> exploration);

class Exp3PlusPlusBwk final : public Policy {
 public:
  enum class Phase { kInitSweep, kMain };

  // Quantities computed by the last main-phase select().
  struct Diagnostics {
    std::uint64_t t = 0;
    double learning_rate = 0.0;
    ConfidenceBounds bounds;
    std::vector<double> gaps;
    std::vector<double> exploration;
    std::vector<double> base_probs;
  };

  Exp3PlusPlusBwk(const InstanceParams& params, const Exp3PPOptions& options = {});

  std::string name() const override { return "EXP3PP_BWK"; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  Phase phase() const { return phase_; }

  std::span<const double> cumulative_loss() const { return cum_loss_; }
  std::span<const std::uint64_t> pull_counts() const { return pulls_; }
  std::vector<double> empirical_efficiency() const;

  // Bounds at the upcoming round; requires the main phase.
  ConfidenceBounds confidence_bounds() const;

  const std::optional<Diagnostics>& diagnostics() const { return diagnostics_; }
  double last_loss_estimate() const { return last_loss_; }

 protected:
  Selection do_select(RngStream& rng) override;
  void do_update(std::size_t arm, const ProbVector& probs, const Outcome& outcome) override;

 private:
  double alpha_;
  double beta_;
  double lambda_;
  Phase phase_ = Phase::kInitSweep;
  std::vector<double> cum_loss_;
  std::vector<std::uint64_t> pulls_;
  std::vector<double> reward_sum_;
  std::vector<double> cost_sum_;
  std::optional<Diagnostics> diagnostics_;
  double last_loss_ = 0.0;
};

// ---------------------------------------------------------------------------
// Baselines

class FixedArmPolicy final : public Policy {
 public:
  FixedArmPolicy(const InstanceParams& params, std::size_t arm);
  std::string name() const override { return "FIXED_ARM"; }
  std::size_t arm() const { return arm_; }

 protected:
  Selection do_select(RngStream& rng) override;
  void do_update(std::size_t, const ProbVector&, const Outcome&) override {}

 private:
  std::size_t arm_;
};

class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(const InstanceParams& params) : Policy(params) {}
  std::string name() const override { return "UNIFORM"; }

 protected:
  Selection do_select(RngStream& rng) override;
  void do_update(std::size_t, const ProbVector&, const Outcome&) override {}
};

}  // namespace bwk
