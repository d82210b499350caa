#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bwk/environments.hpp"

namespace bwk {

enum class PolicyKind { kExp3Bwk, kExp3PPBwk, kFixedArm, kUniform };

const char* to_string(PolicyKind kind);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kExp3Bwk;
  std::optional<double> gamma;  // EXP3.BwK; unset means the budget-dependent default
  double alpha = 3.0;           // EXP3++.BwK
  std::optional<double> beta;
  std::optional<double> lambda;
  std::size_t arm = 0;  // FIXED_ARM

  // Label used in summary rows, e.g. "EXP3_BWK" or "FIXED_ARM:2".
  std::string label() const;
};

// Per-arm distributions; the budget comes from the sweep.
struct StochasticEnvConfig {
  double c_min = 1.0;
  double c_max = 1.0;
  std::vector<ArmDistributions> arms;
};

struct MatrixFileEnvConfig {
  std::filesystem::path path;
  std::optional<double> c_min;  // defaults to the smallest cost in the file
  std::optional<double> c_max;  // defaults to the largest cost in the file
};

// Planted-arm Bernoulli instance with eps = sqrt(K c_min / B). With
// `realize` set, each replication freezes one sample path into an oblivious
// matrix and is scored adversarially.
struct Thm2EnvConfig {
  std::size_t num_arms = 2;
  double c_min = 1.0;
  bool realize = false;
};

struct Thm5EnvConfig {
  double alpha = 0.5;
  std::optional<std::size_t> optimal_arm;  // drawn per replication if unset
};

using EnvironmentConfig =
    std::variant<StochasticEnvConfig, MatrixFileEnvConfig, Thm2EnvConfig, Thm5EnvConfig>;

bool is_stochastic(const EnvironmentConfig& env);

struct ExperimentConfig {
  std::vector<PolicyConfig> policies;
  EnvironmentConfig environment;
  std::vector<double> budgets;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  std::string output;

  // replications >= 1, budgets nonempty and strictly increasing, policies
  // nonempty and consistent with the environment.
  void validate() const;
};

// Parses the JSON experiment document. Unknown keys are errors. Relative
// matrix paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// The configuration with every defaultable field filled in, as JSON text.
std::string resolved_config_json(const ExperimentConfig& config);

// JSON for a stochastic spec, in the same shape as a "stochastic"
// environment block plus the budget and planted arm.
std::string stochastic_spec_json(const StochasticEnvSpec& spec);

}  // namespace bwk
