#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>
#include <numeric>

#include "nnql/learner.hpp"

using namespace nnql;

namespace {

LearnerConfig config_for(const HNet& net, KernelKind kind, double gamma, std::uint64_t t_max = 1000) {
  return LearnerConfig{net.h(), {kind, net.h()}, gamma, t_max, 1.0 / (1.0 - gamma)};
}

TransitionRecord rec(double x, std::size_t a, double r, double next) {
  return TransitionRecord{Point{x}, a, r, Point{next}};
}

}  // namespace

TEST_CASE("learner starts from the zero table") {
  auto net = std::make_shared<const HNet>(build_grid_hnet(Box::unit(1), 0.1));
  const auto s = init_learner(net, {"a0", "a1"}, config_for(*net, KernelKind::OneNN, 0.5));
  CHECK(s.q.sup_norm() == 0.0);
  CHECK(s.alpha == 1.0);
  CHECK(s.k == 0);
  CHECK(std::all_of(s.counts.begin(), s.counts.end(), [](auto c) { return c == 0; }));
  CHECK(q_estimate(s, Point{0.37}, 1) == 0.0);
}

TEST_CASE("single pair: first observation completes the iteration") {
  auto net = std::make_shared<const HNet>(HNet(Box::unit(1), 1.0, {Point{0.5}}));
  auto s = init_learner(net, {"a"}, config_for(*net, KernelKind::OneNN, 0.5));
  const auto out = observe(s, rec(0.2, 0, 0.7, 0.9));
  CHECK(out.target == doctest::Approx(0.7));
  CHECK(out.iteration_completed);
  CHECK(s.gk[0] == doctest::Approx(0.7));
  CHECK(s.q(0, 0) == doctest::Approx(0.7));
  CHECK(s.k == 1);
  CHECK(s.alpha == doctest::Approx(2.0 / 3.0));
  CHECK(s.counts[0] == 0);
}

TEST_CASE("repeat visits keep a running mean") {
  auto net = std::make_shared<const HNet>(HNet(Box::unit(1), 1.0, {Point{0.5}}));
  auto s = init_learner(net, {"a0", "a1"}, config_for(*net, KernelKind::OneNN, 0.5));
  CHECK_FALSE(observe(s, rec(0.5, 0, 1.0, 0.5)).iteration_completed);
  CHECK_FALSE(observe(s, rec(0.5, 0, 0.0, 0.5)).iteration_completed);
  CHECK(s.gk[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.counts[0] == 2);
}

TEST_CASE("observe rejects inconsistent records") {
  auto net = std::make_shared<const HNet>(build_grid_hnet(Box::unit(1), 0.5));
  auto s = init_learner(net, {"a0", "a1"}, config_for(*net, KernelKind::OneNN, 0.5));
  CHECK_THROWS_AS(observe(s, rec(0.5, 2, 0.0, 0.5)), std::out_of_range);
  CHECK_THROWS_AS(observe(s, rec(1.5, 0, 0.0, 0.5)), std::out_of_range);
  CHECK_THROWS_AS(observe(s, rec(0.5, 0, 0.0, -0.1)), std::out_of_range);
}

TEST_CASE("learner config must agree with the net") {
  auto net = std::make_shared<const HNet>(build_grid_hnet(Box::unit(1), 0.5));
  auto cfg = config_for(*net, KernelKind::OneNN, 0.5);
  cfg.h = 0.25;
  CHECK_THROWS_AS(init_learner(net, {"a"}, cfg), std::invalid_argument);
}

TEST_CASE("property: bookkeeping invariants along a trajectory") {
  const auto mdp = make_uniform_mixing(0.5);
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), 0.2));
  for (auto kind : {KernelKind::OneNN, KernelKind::FixedRadius, KernelKind::TruncatedGaussian}) {
    auto s = init_learner(net, mdp.actions(), config_for(*net, kind, 0.5));
    Rng rng(17);
    Point x = sample_uniform(mdp.bounds(), rng);
    std::map<std::size_t, std::vector<double>> targets;  // per pair, current iteration
    std::size_t blends = 0;
    for (int t = 0; t < 20'000; ++t) {
      const std::size_t a = static_cast<std::size_t>(rng() % 2);
      const auto r = step(mdp, x, a, rng);
      const auto counts_before = s.counts;
      const auto q_before = std::vector<double>(s.q.values().begin(), s.q.values().end());
      const double alpha_before = s.alpha;
      const auto out = observe(s, r);
      for (std::size_t i : s.balls) targets[i * 2 + a].push_back(out.target);

      if (out.iteration_completed) {
        ++blends;
        // Every pair was visited: the only zero counts were those this step filled.
        for (std::size_t idx = 0; idx < counts_before.size(); ++idx) {
          if (counts_before[idx] == 0) {
            const bool hit = std::find(s.balls.begin(), s.balls.end(), idx / 2) != s.balls.end() &&
                             idx % 2 == a;
            REQUIRE(hit);
          }
        }
        for (auto c : s.counts) REQUIRE(c == 0);
        // Running means are exact and the blend uses the pre-boundary alpha.
        for (const auto& [idx, list] : targets) {
          const double mean = std::accumulate(list.begin(), list.end(), 0.0) / static_cast<double>(list.size());
          REQUIRE(std::abs(s.gk[idx] - mean) <= 1e-12);
          const double expect = (1 - alpha_before) * q_before[idx] + alpha_before * mean;
          REQUIRE(std::abs(s.q.values()[idx] - expect) <= 1e-12);
        }
        targets.clear();
        REQUIRE(s.alpha == s.beta / (s.beta + static_cast<double>(s.k)));
        REQUIRE(s.t_k == s.t);
        REQUIRE(s.q.sup_norm() <= 2.0 + kStabilitySlack);
      } else {
        REQUIRE(std::any_of(s.counts.begin(), s.counts.end(), [](auto c) { return c == 0; }));
      }
      x = r.next_state;
    }
    CHECK(blends > 10);
  }
}

TEST_CASE("constant reward drives q up to beta from below") {
  const auto mdp = make_uniform_mixing(0.5, RewardFunction::constant(1.0));
  const auto policy = ExplorationPolicy::purely_random(2);
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), 0.25));
  double prev = 0.0;
  const auto cfg = config_for(*net, KernelKind::FixedRadius, 0.5, 200'000);
  const auto run = run_nnql(mdp, policy, net, cfg, 5, [&prev](const LearnerState& s) {
    const double v = s.q(0, 0);
    REQUIRE(v >= prev);
    REQUIRE(v <= 2.0);
    prev = v;
    return true;
  });
  CHECK(run.stats.final_k > 100);
  CHECK(run.q.sup_norm() <= 2.0);
  for (double v : run.q.values()) CHECK(v == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("run_nnql bookkeeping") {
  const auto mdp = make_uniform_mixing(0.5);
  const auto policy = ExplorationPolicy::purely_random(2);
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), 0.1));

  SUBCASE("budget shorter than one covering leaves q at zero") {
    const auto run = run_nnql(mdp, policy, net, config_for(*net, KernelKind::OneNN, 0.5, 5), 1);
    CHECK(run.stats.final_k == 0);
    CHECK(run.stats.steps == 5);
    CHECK(run.q.sup_norm() == 0.0);
  }
  SUBCASE("iteration starts increase and q stays within V_max") {
    const auto run = run_nnql(mdp, policy, net, config_for(*net, KernelKind::OneNN, 0.5, 50'000), 2);
    const auto& starts = run.stats.iteration_starts;
    REQUIRE(starts.size() == run.stats.final_k + 1);
    for (std::size_t i = 1; i < starts.size(); ++i) {
      REQUIRE(starts[i] > starts[i - 1]);
      // Each iteration needs at least n |A| / (max balls per point) steps.
      REQUIRE(starts[i] - starts[i - 1] >= net->size());
    }
    CHECK(run.stats.max_sup_norm <= 2.0 + kStabilitySlack);
    CHECK(run.stats.stability_violations == 0);
  }
  SUBCASE("identical seeds give bit-identical tables") {
    const auto cfg = config_for(*net, KernelKind::TruncatedGaussian, 0.5, 20'000);
    const auto a = run_nnql(mdp, policy, net, cfg, 99);
    const auto b = run_nnql(mdp, policy, net, cfg, 99);
    const auto c = run_nnql(mdp, policy, net, cfg, 100);
    CHECK(std::equal(a.q.values().begin(), a.q.values().end(), b.q.values().begin()));
    CHECK_FALSE(std::equal(a.q.values().begin(), a.q.values().end(), c.q.values().begin()));
  }
  SUBCASE("q_estimate at a center with one-nn is the table entry") {
    auto s = init_learner(net, mdp.actions(), config_for(*net, KernelKind::OneNN, 0.5));
    s.q(3, 1) = 1.25;
    CHECK(q_estimate(s, net->center(3), 1) == 1.25);
  }
}
