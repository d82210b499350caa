#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "bwk/core.hpp"
#include "bwk/rng.hpp"

namespace bwk {

// Supported per-arm distribution families. All have closed-form means.
struct PointMass {
  double value = 0.0;
};
struct UniformInterval {
  double low = 0.0;
  double high = 0.0;
};
// Takes `high` with probability `p`, otherwise `low`.
struct ScaledBernoulli {
  double low = 0.0;
  double high = 1.0;
  double p = 0.5;
};
using Distribution = std::variant<PointMass, UniformInterval, ScaledBernoulli>;

double mean(const Distribution& dist);
double support_min(const Distribution& dist);
double support_max(const Distribution& dist);
// Consumes exactly one uniform draw from rng, whatever the family.
double draw(const Distribution& dist, RngStream& rng);

struct ArmDistributions {
  Distribution reward;
  Distribution cost;
};

struct StochasticEnvSpec {
  InstanceParams params;
  std::vector<ArmDistributions> arms;
  // Set by constructions that plant an optimal arm.
  std::optional<std::size_t> planted_optimal_arm;

  // Throws std::invalid_argument on supports outside [0,1] x [c_min,c_max].
  void validate() const;
};

// Oblivious reward/cost sequences, row-major: entry (t, arm) at
// (t - 1) * K + arm with t 1-based.
struct AdversarialMatrixSpec {
  InstanceParams params;
  std::size_t horizon = 0;
  std::vector<double> rewards;
  std::vector<double> costs;
  std::optional<std::size_t> planted_optimal_arm;

  double reward(std::size_t t, std::size_t arm) const;
  double cost(std::size_t t, std::size_t arm) const;

  // Checks dimensions, entry bounds and horizon >= ceil(B / c_min).
  void validate() const;
};

Outcome stochastic_step(const StochasticEnvSpec& spec, std::size_t arm, RngStream& rng);

Outcome adversarial_step(const AdversarialMatrixSpec& spec, std::size_t t, std::size_t arm);

// mu(arm) / rho(arm) from the distribution parameters.
double true_efficiency(const StochasticEnvSpec& spec, std::size_t arm);

// Lower-bound instance for the c_max = 1 regime: a uniformly drawn arm has
// Bernoulli(0.5 + eps) rewards, the rest Bernoulli(0.5), every cost is c_min,
// with eps = sqrt(K c_min / B).
StochasticEnvSpec build_thm2_adversary(const InstanceParams& params, RngStream& rng);

double thm2_epsilon(const InstanceParams& params);

// Two-arm unbounded-cost instance with c_max = B^alpha and
// t* = floor(B - B^alpha). Both arms pay 1 and earn 0 up to t*; at t*+1 the
// optimal arm pays 1 for reward 1 while the other pays B^alpha for nothing;
// afterwards both earn 1 at cost 1.
AdversarialMatrixSpec build_thm5_adversary(double alpha, double budget, std::size_t optimal_arm);
AdversarialMatrixSpec build_thm5_adversary(double alpha, double budget, RngStream& rng);

std::size_t thm5_switch_round(double alpha, double budget);

// Freezes one sample path of a stochastic instance into an oblivious matrix
// of the given horizon (defaults to ceil(B / c_min)).
AdversarialMatrixSpec realize_matrix(const StochasticEnvSpec& spec, RngStream& rng,
                                     std::optional<std::size_t> horizon = std::nullopt);

}  // namespace bwk
