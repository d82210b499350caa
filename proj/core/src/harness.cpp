#include "bwk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bwk/matrix_io.hpp"

namespace bwk {

const InstanceParams& environment_params(const Environment& env) {
  return std::visit([](const auto& spec) -> const InstanceParams& { return spec.params; }, env);
}

RunTrace run_episode(Policy& policy, const Environment& env, std::uint64_t seed,
                     std::uint64_t stream_id, const RoundObserver& observer) {
  const InstanceParams& params = environment_params(env);
  if (policy.params().num_arms != params.num_arms)
    throw std::invalid_argument("policy and environment disagree on K");

  const RngStream root(seed, stream_id);
  RngStream policy_rng = root.fork(kPolicyStream);
  RngStream env_rng = root.fork(kEnvSampleStream);

  RunTrace trace;
  trace.budget = params.budget;
  const std::size_t horizon = params.horizon_cap();
  trace.terminated_by = Termination::kBudgetExhausted;
  while (!policy.terminated()) {
    if (trace.rounds.size() >= horizon) {
      trace.terminated_by = Termination::kHorizonCap;
      break;
    }
    Selection sel = policy.select(policy_rng);
    if (observer) observer(policy, sel);
    const std::uint64_t t = trace.rounds.size() + 1;
    const Outcome outcome = std::visit(
        [&](const auto& spec) -> Outcome {
          using T = std::decay_t<decltype(spec)>;
          if constexpr (std::is_same_v<T, StochasticEnvSpec>)
            return stochastic_step(spec, sel.arm, env_rng);
          else
            return adversarial_step(spec, t, sel.arm);
        },
        env);
    if (policy.update(sel.arm, sel.probs, outcome) == StepStatus::kAborted) {
      trace.aborted_pull = AbortedPull{sel.arm, outcome};
      break;
    }
    trace.total_reward += outcome.reward;
    trace.total_cost += outcome.cost;
    trace.rounds.push_back({t, sel.arm, std::move(sel.probs), outcome, policy.remaining_budget()});
  }
  return trace;
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const InstanceParams& params) {
  switch (config.kind) {
    case PolicyKind::kExp3Bwk:
      return std::make_unique<Exp3Bwk>(params, config.gamma);
    case PolicyKind::kExp3PPBwk:
      return std::make_unique<Exp3PlusPlusBwk>(
          params, Exp3PPOptions{config.alpha, config.beta, config.lambda});
    case PolicyKind::kFixedArm:
      return std::make_unique<FixedArmPolicy>(params, config.arm);
    case PolicyKind::kUniform:
      return std::make_unique<UniformPolicy>(params);
  }
  throw std::invalid_argument("unknown policy kind");
}

RunTrace run_episode(const PolicyConfig& policy, const Environment& env, std::uint64_t seed,
                     std::uint64_t stream_id, const RoundObserver& observer) {
  auto p = make_policy(policy, environment_params(env));
  return run_episode(*p, env, seed, stream_id, observer);
}

Environment build_environment(const EnvironmentConfig& config, double budget, RngStream& rng,
                              const MatrixTable* preloaded) {
  if (const auto* s = std::get_if<StochasticEnvConfig>(&config)) {
    StochasticEnvSpec spec;
    spec.params = InstanceParams{s->arms.size(), budget, s->c_min, s->c_max};
    spec.arms = s->arms;
    spec.validate();
    return spec;
  }
  if (const auto* m = std::get_if<MatrixFileEnvConfig>(&config)) {
    const MatrixTable table = preloaded ? *preloaded : read_matrix_csv(m->path);
    return make_matrix_spec(table, budget, m->c_min.value_or(table.min_cost()),
                            m->c_max.value_or(table.max_cost()));
  }
  if (const auto* t2 = std::get_if<Thm2EnvConfig>(&config)) {
    const StochasticEnvSpec spec =
        build_thm2_adversary(InstanceParams{t2->num_arms, budget, t2->c_min, 1.0}, rng);
    if (!t2->realize) return spec;
    return realize_matrix(spec, rng);
  }
  const auto& t5 = std::get<Thm5EnvConfig>(config);
  if (t5.optimal_arm) return build_thm5_adversary(t5.alpha, budget, *t5.optimal_arm);
  return build_thm5_adversary(t5.alpha, budget, rng);
}

std::uint64_t replication_stream_id(double budget, std::size_t replication) {
  return hash_combine(mix64(std::bit_cast<std::uint64_t>(budget)),
                      static_cast<std::uint64_t>(replication));
}

std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t stream_id,
                           std::size_t policy_index) {
  return hash_combine(hash_combine(base_seed, stream_id), static_cast<std::uint64_t>(policy_index));
}

namespace {

struct Job {
  std::size_t budget_index;
  std::size_t replication;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::size_t n_policies = config.policies.size();
  const std::size_t n_reps = config.replications;

  std::optional<MatrixTable> table;
  if (const auto* m = std::get_if<MatrixFileEnvConfig>(&config.environment))
    table = read_matrix_csv(m->path);

  std::vector<Job> jobs;
  jobs.reserve(config.budgets.size() * n_reps);
  for (std::size_t b = 0; b < config.budgets.size(); ++b)
    for (std::size_t r = 0; r < n_reps; ++r) jobs.push_back({b, r});

  // Slot (job, policy) is written by exactly one worker.
  std::vector<EpisodeRecord> episodes(jobs.size() * n_policies);
  std::vector<double> taus(episodes.size());
  std::vector<double> costs(episodes.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_job = jobs.size();

  auto worker = [&] {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const double budget = config.budgets[jobs[j].budget_index];
      const std::size_t rep = jobs[j].replication;
      const std::uint64_t stream = replication_stream_id(budget, rep);
      try {
        RngStream build_rng = RngStream(config.base_seed, stream).fork(kEnvBuildStream);
        const Environment env = build_environment(config.environment, budget, build_rng,
                                                  table ? &*table : nullptr);
        std::optional<HindsightReport> hindsight;
        if (const auto* m = std::get_if<AdversarialMatrixSpec>(&env))
          hindsight = hindsight_fixed_arms(*m);
        for (std::size_t p = 0; p < n_policies; ++p) {
          RunTrace trace = run_episode(config.policies[p], env, config.base_seed, stream);
          EpisodeRecord& rec = episodes[j * n_policies + p];
          rec.policy = config.policies[p].label();
          rec.budget = budget;
          rec.replication = rep;
          rec.seed = episode_seed(config.base_seed, stream, p);
          if (const auto* s = std::get_if<StochasticEnvSpec>(&env))
            rec.regret = stochastic_regret(trace, *s);
          else
            rec.regret = adversarial_regret(trace, std::get<AdversarialMatrixSpec>(env), *hindsight);
          taus[j * n_policies + p] = static_cast<double>(trace.tau());
          costs[j * n_policies + p] = trace.total_cost;
          if (options.keep_traces) rec.trace = std::move(trace);
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (j < first_error_job) {
          first_error_job = j;
          first_error = std::make_exception_ptr(std::runtime_error(
              "episode failed (B=" + std::to_string(budget) + ", replication=" +
              std::to_string(rep) + ", seed=" + std::to_string(config.base_seed) + ", stream=" +
              std::to_string(stream) + "): " + e.what()));
        }
        next.store(jobs.size());
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(options.threads, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  // Ordered reduction: rows in (B, policy) order, replications in index order.
  ExperimentResult result;
  for (std::size_t b = 0; b < config.budgets.size(); ++b) {
    for (std::size_t p = 0; p < n_policies; ++p) {
      std::vector<RegretReport> reports;
      double tau_sum = 0.0, cost_sum = 0.0;
      for (std::size_t r = 0; r < n_reps; ++r) {
        const std::size_t slot = (b * n_reps + r) * n_policies + p;
        reports.push_back(episodes[slot].regret);
        tau_sum += taus[slot];
        cost_sum += costs[slot];
      }
      const RegretReport agg = aggregate_regret(reports);
      result.rows.push_back({config.policies[p].label(), config.budgets[b], n_reps, agg.mean,
                             agg.standard_error, tau_sum / static_cast<double>(n_reps),
                             cost_sum / static_cast<double>(n_reps)});
    }
  }
  result.episodes = std::move(episodes);
  return result;
}

SlopeFit fit_loglog_slope(std::span<const BudgetRegret> points) {
  if (points.size() < 3) throw std::invalid_argument("slope fit needs at least 3 points");
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (const auto& pt : points) {
    if (!(pt.budget > 0.0)) throw std::invalid_argument("slope fit needs positive budgets");
    if (!(pt.regret > 0.0)) {
      ++fit.dropped;
      continue;
    }
    xs.push_back(std::log(pt.budget));
    ys.push_back(std::log(pt.regret));
  }
  if (xs.size() < 3)
    throw std::invalid_argument("slope fit needs at least 3 positive-regret points, got " +
                                std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("slope fit needs distinct budgets");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.used = xs.size();
  return fit;
}

}  // namespace bwk
