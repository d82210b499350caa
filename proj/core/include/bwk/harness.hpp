#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bwk/config.hpp"
#include "bwk/core.hpp"
#include "bwk/environments.hpp"
#include "bwk/evaluation.hpp"
#include "bwk/matrix_io.hpp"
#include "bwk/policies.hpp"

namespace bwk {

using Environment = std::variant<StochasticEnvSpec, AdversarialMatrixSpec>;

const InstanceParams& environment_params(const Environment& env);

// Called after every select(), before the environment is queried.
using RoundObserver = std::function<void(const Policy&, const Selection&)>;

// Sub-stream tags forked from the episode's root stream.
inline constexpr std::uint64_t kPolicyStream = 1;
inline constexpr std::uint64_t kEnvSampleStream = 2;
inline constexpr std::uint64_t kEnvBuildStream = 3;

// Drives select/update until the policy terminates or ceil(B/c_min) + 1
// rounds have completed.
RunTrace run_episode(Policy& policy, const Environment& env, std::uint64_t seed,
                     std::uint64_t stream_id, const RoundObserver& observer = {});

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const InstanceParams& params);

RunTrace run_episode(const PolicyConfig& policy, const Environment& env, std::uint64_t seed,
                     std::uint64_t stream_id, const RoundObserver& observer = {});

// Builds the instance for one (budget, replication) from a fixed build stream.
// A matrix-file environment reads `preloaded` instead of the file when given.
Environment build_environment(const EnvironmentConfig& config, double budget, RngStream& rng,
                              const MatrixTable* preloaded = nullptr);

// stream_id = hash(B, replication); independent of the other budgets.
std::uint64_t replication_stream_id(double budget, std::size_t replication);

// Identifies one (base_seed, stream, policy) episode; names trace files.
std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t stream_id,
                           std::size_t policy_index);

struct SummaryRow {
  std::string policy;
  double budget = 0.0;
  std::size_t replications = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_tau = 0.0;
  double mean_total_cost = 0.0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct EpisodeRecord {
  std::string policy;
  double budget = 0.0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  RegretReport regret;
  RunTrace trace;  // empty unless traces were requested
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;          // (B, policy) order
  std::vector<EpisodeRecord> episodes;   // (B, replication, policy) order
};

struct RunOptions {
  std::size_t threads = 1;
  bool keep_traces = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;  // nonpositive regrets skipped
};

struct BudgetRegret {
  double budget = 0.0;
  double regret = 0.0;
};

// Least-squares slope of ln(regret) on ln(B). Nonpositive regrets are
// dropped; fewer than three survivors is an error.
SlopeFit fit_loglog_slope(std::span<const BudgetRegret> points);

}  // namespace bwk
