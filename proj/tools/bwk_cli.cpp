// bwk: experiment runner for budgeted bandit policies.
//
//   bwk run --config exp.json --out results/exp [--threads 4] [--emit-traces]
//   bwk slope results/exp_summary.csv
//   bwk gen-env thm2 --K 5 --B 4000 --c-min 0.25 --seed 7 --out thm2.json
//   bwk gen-env thm5 --alpha 0.5 --B 100 --optimal-arm 0 --out thm5.csv

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bwk/config.hpp"
#include "bwk/environments.hpp"
#include "bwk/harness.hpp"
#include "bwk/matrix_io.hpp"
#include "bwk/results_io.hpp"

namespace {

int cmd_run(const std::string& config_path, std::string out_prefix, std::size_t threads,
            bool emit_traces) {
  const bwk::ExperimentConfig config = bwk::load_experiment_config(config_path);
  if (out_prefix.empty()) out_prefix = config.output;
  if (out_prefix.empty()) throw std::invalid_argument("no output prefix: pass --out or set 'output'");
  const auto result = bwk::run_experiment(config, {threads, emit_traces});
  for (const auto& path : bwk::emit_results(result, config, out_prefix, emit_traces))
    std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_slope(const std::string& summary_path, const std::string& policy_filter) {
  const auto rows = bwk::read_summary_csv(summary_path);
  std::map<std::string, std::vector<bwk::BudgetRegret>> by_policy;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!policy_filter.empty() && r.policy != policy_filter) continue;
    if (!by_policy.contains(r.policy)) order.push_back(r.policy);
    by_policy[r.policy].push_back({r.budget, r.mean_regret});
  }
  if (order.empty()) throw std::invalid_argument("no matching rows in " + summary_path);
  for (const auto& name : order) {
    const auto fit = bwk::fit_loglog_slope(by_policy[name]);
    if (fit.dropped > 0)
      std::cerr << "warning: " << name << ": dropped " << fit.dropped
                << " nonpositive-regret point(s)\n";
    if (order.size() == 1)
      std::cout << fit.slope << '\n';
    else
      std::cout << name << ' ' << fit.slope << '\n';
  }
  return 0;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted bandit experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_prefix;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool emit_traces = false;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_prefix, "Output path prefix (overrides the config)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--emit-traces", emit_traces, "Also write one CSV per episode");

  std::string summary_path, policy_filter;
  auto* slope = app.add_subcommand("slope", "Fit the log-log regret exponent of a summary CSV");
  slope->add_option("summary", summary_path, "Summary CSV")->required();
  slope->add_option("--policy", policy_filter, "Only fit this policy's rows");

  auto* gen = app.add_subcommand("gen-env", "Write a lower-bound instance to a file");
  gen->require_subcommand(1);

  std::size_t k = 2;
  double budget = 0.0, c_min = 1.0;
  std::uint64_t seed = 0;
  bool realize = false;
  std::string out_path;
  auto* thm2 = gen->add_subcommand("thm2", "Planted Bernoulli instance (JSON, or matrix CSV with --realize)");
  thm2->add_option("--K", k, "Number of arms")->required();
  thm2->add_option("--B", budget, "Budget")->required();
  thm2->add_option("--c-min", c_min, "Minimum (and every) cost")->required();
  thm2->add_option("--seed", seed, "Seed for the planted arm and realization");
  thm2->add_flag("--realize", realize, "Freeze one sample path into a matrix CSV");
  thm2->add_option("--out", out_path, "Output file")->required();

  double alpha = 0.5;
  std::optional<std::size_t> optimal_arm;
  auto* thm5 = gen->add_subcommand("thm5", "Two-arm unbounded-cost matrix (CSV)");
  thm5->add_option("--alpha", alpha, "Exponent in c_max = B^alpha")->required();
  thm5->add_option("--B", budget, "Budget")->required();
  thm5->add_option("--optimal-arm", optimal_arm, "Optimal arm (0 or 1); drawn from --seed if unset");
  thm5->add_option("--seed", seed, "Seed used when --optimal-arm is unset");
  thm5->add_option("--out", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(config_path, out_prefix, threads, emit_traces);
    if (*slope) return cmd_slope(summary_path, policy_filter);
    if (*thm2) {
      bwk::RngStream rng(seed, 0);
      const auto spec = bwk::build_thm2_adversary(bwk::InstanceParams{k, budget, c_min, 1.0}, rng);
      if (realize)
        bwk::write_matrix_csv(out_path, bwk::realize_matrix(spec, rng));
      else
        write_text(out_path, bwk::stochastic_spec_json(spec));
      std::cout << "wrote " << out_path << " (optimal arm " << *spec.planted_optimal_arm << ")\n";
      return 0;
    }
    if (*thm5) {
      bwk::RngStream rng(seed, 0);
      const auto spec = optimal_arm ? bwk::build_thm5_adversary(alpha, budget, *optimal_arm)
                                    : bwk::build_thm5_adversary(alpha, budget, rng);
      bwk::write_matrix_csv(out_path, spec);
      std::cout << "wrote " << out_path << " (optimal arm " << *spec.planted_optimal_arm
                << ", c_max " << spec.params.c_max << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
