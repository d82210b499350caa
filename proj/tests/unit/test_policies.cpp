#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bwk/environments.hpp"
#include "bwk/harness.hpp"
#include "bwk/policies.hpp"
#include "doctest.h"

using namespace bwk;

namespace {

// O(K^2) reading of max(0, max_{j != i} lcb_j - ucb_i).
std::vector<double> gaps_by_definition(const std::vector<double>& ucb, const std::vector<double>& lcb) {
  std::vector<double> out(ucb.size(), 0.0);
  for (std::size_t i = 0; i < ucb.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ucb.size(); ++j)
      if (j != i) best = std::max(best, lcb[j]);
    out[i] = ucb.size() > 1 ? std::max(0.0, best - ucb[i]) : 0.0;
  }
  return out;
}

StochasticEnvSpec random_instance(RngStream& rng, std::size_t k, double budget, double c_min) {
  StochasticEnvSpec spec;
  spec.params = InstanceParams{k, budget, c_min, 1.0};
  for (std::size_t i = 0; i < k; ++i) {
    spec.arms.push_back({ScaledBernoulli{0.0, 1.0, rng.uniform01()},
                         UniformInterval{c_min, c_min + (1.0 - c_min) * rng.uniform01()}});
  }
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("exp3bwk_init") {
  SUBCASE("default exploration rate, K=2 B=100 c_min=0.5") {
    Exp3Bwk policy(InstanceParams{2, 100.0, 0.5, 1.0});
    CHECK(policy.gamma() == doctest::Approx(0.063249577201100890382).epsilon(1e-14));
    for (double w : policy.log_weights()) CHECK(w == 0.0);
  }
  SUBCASE("single arm") {
    Exp3Bwk policy(InstanceParams{1, 10.0, 0.5, 1.0});
    CHECK(policy.gamma() == 0.0);
    CHECK(policy.probabilities()[0] == 1.0);
  }
  SUBCASE("tiny budget clamps to 1") {
    CHECK(exp3bwk_default_gamma(InstanceParams{10, 0.01, 1.0, 1.0}) == 1.0);
  }
  SUBCASE("both exploration-rate variants converge as B grows") {
    const InstanceParams small{5, 50.0, 0.25, 1.0};
    const InstanceParams large{5, 5e7, 0.25, 1.0};
    CHECK(exp3bwk_statement_gamma(small) > exp3bwk_default_gamma(small));
    CHECK(exp3bwk_statement_gamma(large) / exp3bwk_default_gamma(large) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("override outside (0,1]") {
    const InstanceParams p{2, 100.0, 0.5, 1.0};
    CHECK_THROWS_AS(Exp3Bwk(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Exp3Bwk(p, 1.5), std::invalid_argument);
    CHECK(Exp3Bwk(p, 0.3).gamma() == 0.3);
  }
}

TEST_CASE("exp3bwk_select") {
  SUBCASE("uniform at the first round") {
    for (double g : {0.01, 0.5, 1.0}) {
      Exp3Bwk policy(InstanceParams{4, 100.0, 0.5, 1.0}, g);
      RngStream rng(1, 1);
      const auto sel = policy.select(rng);
      for (double p : sel.probs.values()) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    }
  }
  SUBCASE("mixture with weights (3, 1) and gamma 0.1") {
    const std::vector<double> log_w{std::log(3.0), 0.0};
    const auto p = exp3bwk_probabilities(log_w, 0.1);
    CHECK(p[0] == doctest::Approx(0.725).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.275).epsilon(1e-14));
  }
  SUBCASE("terminated episode") {
    Exp3Bwk policy(InstanceParams{2, 1.0, 1.0, 1.0});
    RngStream rng(1, 1);
    auto sel = policy.select(rng);
    CHECK(policy.update(sel.arm, sel.probs, {1.0, 1.0}) == StepStatus::kAccepted);
    CHECK(policy.terminated());
    CHECK_THROWS_WITH(policy.select(rng), "episode over");
  }
}

TEST_CASE("exp3bwk_update") {
  const InstanceParams params{3, 100.0, 0.4, 1.0};
  Exp3Bwk policy(params, 0.2);
  const ProbVector probs(std::vector<double>{0.5, 0.25, 0.25});
  REQUIRE(policy.update(0, probs, {0.8, 0.4}) == StepStatus::kAccepted);
  CHECK(policy.last_efficiency_estimate() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(policy.log_weights()[0] == doctest::Approx(0.2 * 0.4 * 4.0 / 3.0).epsilon(1e-15));
  CHECK(policy.log_weights()[1] == 0.0);
  CHECK(policy.log_weights()[2] == 0.0);
  CHECK(policy.remaining_budget() == doctest::Approx(99.6));

  CHECK_THROWS_WITH(policy.update(1, ProbVector(std::vector<double>{1.0, 0.0, 0.0}), {0.5, 0.5}),
                    "impossible selection");
}

TEST_CASE("unaffordable pull aborts without payment") {
  Exp3Bwk policy(InstanceParams{2, 1.5, 0.5, 1.0});
  const auto probs = ProbVector::uniform(2);
  CHECK(policy.update(0, probs, {1.0, 1.0}) == StepStatus::kAccepted);
  const auto weights_before = std::vector<double>(policy.log_weights().begin(), policy.log_weights().end());
  CHECK(policy.update(1, probs, {1.0, 0.75}) == StepStatus::kAborted);
  CHECK(policy.terminated());
  CHECK(policy.remaining_budget() == 0.5);
  REQUIRE(policy.aborted_pull().has_value());
  CHECK(policy.aborted_pull()->arm == 1);
  CHECK(std::vector<double>(policy.log_weights().begin(), policy.log_weights().end()) == weights_before);
  CHECK(policy.rounds_completed() == 1);
}

TEST_CASE("EXP3.BwK invariants over random episodes") {
  RngStream meta(314, 0);
  for (int ep = 0; ep < 60; ++ep) {
    const std::size_t k = 2 + meta.uniform_index(6);
    const double c_min = 0.1 + 0.9 * meta.uniform01();
    const auto spec = random_instance(meta, k, 50.0 + 400.0 * meta.uniform01(), c_min);
    Exp3Bwk policy(spec.params);
    const double floor = policy.gamma() / static_cast<double>(k);
    RngStream prng(ep, 1), erng(ep, 2);
    while (!policy.terminated()) {
      const auto sel = policy.select(prng);
      for (double p : sel.probs.values()) REQUIRE(p >= floor);
      const Outcome o = stochastic_step(spec, sel.arm, erng);
      if (policy.update(sel.arm, sel.probs, o) == StepStatus::kAccepted) {
        REQUIRE(policy.last_log_weight_increment() >= 0.0);
        REQUIRE(policy.last_log_weight_increment() <= 1.0 + 4 * std::numeric_limits<double>::epsilon());
      }
    }
    CHECK(policy.remaining_budget() >= 0.0);
  }
}

TEST_CASE("exp3pp_init") {
  SUBCASE("defaults") {
    Exp3PlusPlusBwk a(InstanceParams{2, 10.0, 0.5, 1.0});
    CHECK(a.beta() == 1024.0);
    CHECK(a.lambda() == 0.5);
    CHECK(a.alpha() == 3.0);
    Exp3PlusPlusBwk b(InstanceParams{2, 10.0, 1.0, 1.0});
    CHECK(b.beta() == 256.0);
    CHECK(b.phase() == Exp3PlusPlusBwk::Phase::kInitSweep);
  }
  SUBCASE("precondition failures") {
    const InstanceParams p{2, 10.0, 0.5, 1.0};
    CHECK_THROWS_AS(Exp3PlusPlusBwk(p, {3.0, std::nullopt, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Exp3PlusPlusBwk(p, {2.0}), std::invalid_argument);
    CHECK_THROWS_WITH(Exp3PlusPlusBwk(InstanceParams{3, 2.5, 0.5, 1.0}),
                      "budget cannot cover initialization sweep");
  }
  SUBCASE("initialization sweep") {
    Exp3PlusPlusBwk policy(InstanceParams{3, 10.0, 0.5, 1.0});
    RngStream rng(1, 1);
    const std::vector<Outcome> outcomes{{0.5, 1.0}, {1.0, 0.5}, {0.0, 0.75}};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto sel = policy.select(rng);
      CHECK(sel.arm == i);
      CHECK(sel.probs[i] == 1.0);
      CHECK_THROWS(policy.confidence_bounds());
      policy.update(sel.arm, sel.probs, outcomes[i]);
    }
    CHECK(policy.phase() == Exp3PlusPlusBwk::Phase::kMain);
    for (auto n : policy.pull_counts()) CHECK(n == 1);
    for (double l : policy.cumulative_loss()) CHECK(l == 0.0);
    const auto e = policy.empirical_efficiency();
    CHECK(e == std::vector<double>{0.5, 2.0, 0.0});
    CHECK(policy.remaining_budget() == doctest::Approx(7.75));
  }
}

TEST_CASE("exp3pp_confidence_bounds") {
  SUBCASE("scripted oracle values") {
    // K=2, t=e^3/sqrt(2), N=5000, alpha=3, lambda=c_min=0.5, empirical efficiency 1.
    const double t = std::exp(3.0) / std::numbers::sqrt2;
    CHECK(exp3pp_eta(3.0, 2, t, 5000) == doctest::Approx(0.029416706834246465912).epsilon(1e-13));
    const std::vector<double> e{1.0, 1.0};
    const std::vector<std::uint64_t> n{5000, 5000};
    const auto b = exp3pp_confidence_bounds(e, n, t, 3.0, 0.5, 0.5);
    CHECK(b.ucb[0] == doctest::Approx(1.187533475549152276).epsilon(1e-13));
    CHECK(b.lcb[0] == doctest::Approx(0.81246652445084772399).epsilon(1e-13));
  }
  SUBCASE("small samples give vacuous bounds") {
    const std::vector<double> e{1.5, 0.2};
    const std::vector<std::uint64_t> n{1, 2};
    const auto b = exp3pp_confidence_bounds(e, n, 10.0, 3.0, 0.5, 0.5);
    CHECK(b.ucb == std::vector<double>{2.0, 2.0});
    CHECK(b.lcb == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("bounds are ordered and clamped") {
    RngStream rng(77, 0);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t k = 1 + rng.uniform_index(6);
      const double c_min = 0.1 + 0.9 * rng.uniform01();
      std::vector<double> e(k);
      std::vector<std::uint64_t> n(k);
      for (std::size_t i = 0; i < k; ++i) {
        e[i] = rng.uniform01() / c_min;
        n[i] = 1 + rng.uniform_index(100000);
      }
      const double t = 1.0 + static_cast<double>(rng.uniform_index(200000));
      const auto b = exp3pp_confidence_bounds(e, n, t, 3.0, c_min * (0.2 + 0.8 * rng.uniform01()), c_min);
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(b.lcb[i] <= b.ucb[i]);
        CHECK(b.lcb[i] >= 0.0);
        CHECK(b.ucb[i] <= 1.0 / c_min);
      }
    }
  }
}

TEST_CASE("exp3pp_gap_estimates") {
  CHECK(exp3pp_gap_estimates(std::vector<double>{0.7, 0.7, 0.7}, std::vector<double>{0.2, 0.2, 0.2}) ==
        std::vector<double>{0.0, 0.0, 0.0});
  const auto g = exp3pp_gap_estimates(std::vector<double>{1.0, 0.3}, std::vector<double>{0.9, 0.1});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(exp3pp_gap_estimates(std::vector<double>{1.0}, std::vector<double>{0.5}) ==
        std::vector<double>{0.0});

  RngStream rng(5, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(7);
    std::vector<double> ucb(k), lcb(k);
    for (std::size_t i = 0; i < k; ++i) {
      lcb[i] = rng.uniform01() * 3.0;
      ucb[i] = lcb[i] + rng.uniform01();
    }
    const auto fast = exp3pp_gap_estimates(ucb, lcb);
    CHECK(fast == gaps_by_definition(ucb, lcb));
    for (double x : fast) CHECK(x >= 0.0);
  }
}

TEST_CASE("exp3pp exploration and mixing") {
  CHECK(exp3pp_learning_rate(100, 2, 1.0) == doctest::Approx(0.029435250562886867275).epsilon(1e-14));
  CHECK(exp3pp_learning_rate(100, 1, 1.0) == 0.0);

  SUBCASE("zero gap never binds") {
    const auto eps = exp3pp_exploration(std::vector<double>{0.0, 0.0}, 10, 256.0);
    CHECK(eps[0] == doctest::Approx(std::min(0.25, 0.5 * std::sqrt(std::log(2.0) / 10.0))));
  }
  SUBCASE("large gap at late rounds binds") {
    const auto eps = exp3pp_exploration(std::vector<double>{0.0, 4.0}, 100000000, 1.0);
    CHECK(eps[1] == doctest::Approx(std::log(1e8) / (1e8 * 16.0)));
    CHECK(eps[1] < eps[0]);
  }
  SUBCASE("single arm has no exploration") {
    CHECK(exp3pp_exploration(std::vector<double>{0.0}, 50, 256.0) == std::vector<double>{0.0});
  }
  SUBCASE("mixture sums to one and floors at eps") {
    RngStream rng(8, 8);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 1 + rng.uniform_index(8);
      std::vector<double> w(k), gaps(k);
      for (std::size_t i = 0; i < k; ++i) {
        w[i] = (rng.uniform01() - 0.5) * 40.0;
        gaps[i] = rng.uniform01() < 0.5 ? 0.0 : rng.uniform01() * 4.0;
      }
      const auto t = 2 + rng.uniform_index(100000);
      const auto eps = exp3pp_exploration(gaps, t, 16.0);
      const auto mixed = exp3pp_mix(normalized_probs_from_log_weights(w), eps);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(eps[i] <= 1.0 / (2.0 * static_cast<double>(k)));
        CHECK(mixed[i] >= eps[i]);
        sum += mixed[i];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("exp3pp_select and update") {
  SUBCASE("single arm plays with probability one") {
    Exp3PlusPlusBwk policy(InstanceParams{1, 5.0, 1.0, 1.0});
    RngStream rng(1, 1);
    auto sel = policy.select(rng);
    policy.update(sel.arm, sel.probs, {1.0, 1.0});
    sel = policy.select(rng);
    CHECK(sel.probs[0] == 1.0);
    REQUIRE(policy.diagnostics().has_value());
    CHECK(policy.diagnostics()->learning_rate == 0.0);
    CHECK(policy.diagnostics()->exploration[0] == 0.0);
  }
  SUBCASE("loss estimates") {
    Exp3PlusPlusBwk policy(InstanceParams{2, 100.0, 1.0, 1.0});
    const auto pm0 = ProbVector::point_mass(2, 0), pm1 = ProbVector::point_mass(2, 1);
    policy.update(0, pm0, {0.5, 1.0});
    policy.update(1, pm1, {0.5, 1.0});
    REQUIRE(policy.phase() == Exp3PlusPlusBwk::Phase::kMain);
    policy.update(0, ProbVector::uniform(2), {1.0, 1.0});
    CHECK(policy.last_loss_estimate() == 0.0);
    policy.update(1, ProbVector::uniform(2), {0.25, 1.0});
    CHECK(policy.last_loss_estimate() == doctest::Approx(2.0 - 0.5));
    CHECK(policy.cumulative_loss()[0] == 0.0);
    CHECK(policy.cumulative_loss()[1] == doctest::Approx(1.5));
    CHECK(policy.pull_counts()[0] == 2);
    CHECK(policy.empirical_efficiency()[1] == doctest::Approx(0.75 / 2.0));
  }
  SUBCASE("loss estimates stay nonnegative and probabilities valid") {
    RngStream meta(2718, 0);
    for (int ep = 0; ep < 40; ++ep) {
      const std::size_t k = 2 + meta.uniform_index(5);
      const double c_min = 0.2 + 0.8 * meta.uniform01();
      const auto spec = random_instance(meta, k, 20.0 + 600.0 * meta.uniform01(), c_min);
      Exp3PlusPlusBwk policy(spec.params);
      RngStream prng(ep, 1), erng(ep, 2);
      while (!policy.terminated()) {
        const auto sel = policy.select(prng);
        if (policy.phase() == Exp3PlusPlusBwk::Phase::kMain) {
          const auto& d = *policy.diagnostics();
          for (std::size_t i = 0; i < k; ++i) {
            REQUIRE(d.exploration[i] <= 1.0 / (2.0 * static_cast<double>(k)));
            REQUIRE(sel.probs[i] >= d.exploration[i]);
          }
        }
        const bool main_phase = policy.phase() == Exp3PlusPlusBwk::Phase::kMain;
        if (policy.update(sel.arm, sel.probs, stochastic_step(spec, sel.arm, erng)) ==
                StepStatus::kAccepted &&
            main_phase) {
          REQUIRE(policy.last_loss_estimate() >= 0.0);
        }
      }
      for (double l : policy.cumulative_loss()) CHECK(std::isfinite(l));
    }
  }
}

TEST_CASE("baselines") {
  SUBCASE("fixed arm plays one arm within budget") {
    StochasticEnvSpec spec;
    spec.params = InstanceParams{3, 37.3, 0.25, 1.0};
    spec.arms = {{PointMass{0.1}, PointMass{1.0}},
                 {ScaledBernoulli{0.0, 1.0, 0.5}, UniformInterval{0.25, 1.0}},
                 {PointMass{0.9}, PointMass{0.5}}};
    const auto trace = run_episode(PolicyConfig{PolicyKind::kFixedArm, {}, 3.0, {}, {}, 1}, spec, 4, 4);
    for (const auto& r : trace.rounds) CHECK(r.arm == 1);
    CHECK(trace.total_cost <= 37.3);
    CHECK_THROWS_AS(FixedArmPolicy(spec.params, 3), std::out_of_range);
  }
  SUBCASE("uniform on the planted instance earns 0.5 + eps/K per round") {
    const InstanceParams params{4, 400.0, 0.25, 1.0};
    RngStream build(3, 0);
    const auto spec = build_thm2_adversary(params, build);
    double reward = 0.0, rounds = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto trace = run_episode(PolicyConfig{PolicyKind::kUniform}, spec, s, 0);
      reward += trace.total_reward;
      rounds += static_cast<double>(trace.tau());
    }
    CHECK(rounds == 160000.0);
    CHECK(reward / rounds == doctest::Approx(0.5125).epsilon(0.01));
  }
}
