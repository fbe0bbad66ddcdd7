#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "nnql/explore.hpp"

using namespace nnql;

namespace {

// Deterministic walk through the centers 0, 0.25, ..., 1 and back to 0.
MdpSpec cycle_mdp(std::size_t n_actions) {
  MdpSpec::Definition def;
  def.name = "cycle";
  def.bounds = Box::unit(1);
  for (std::size_t a = 0; a < n_actions; ++a) def.actions.push_back("a" + std::to_string(a));
  def.transition_sampler = [](std::span<const double> x, std::size_t, Rng&) {
    const double next = std::round(x[0] * 4.0) + 1.0;
    return Point{next > 4.0 ? 0.0 : next / 4.0};
  };
  def.reward_sampler = [](std::span<const double>, std::size_t, Rng&) { return 0.0; };
  return MdpSpec(def);
}

HNet cycle_net() {
  return HNet(Box::unit(1), 0.1, {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}});
}

}  // namespace

TEST_CASE("cover time examples") {
  SUBCASE("single ball, single action") {
    const auto mdp = make_uniform_mixing(0.5, RewardFunction::first_coordinate(), 1, 1);
    const HNet net(Box::unit(1), 0.5, {{0.5}});
    CHECK(measure_cover_time(mdp, ExplorationPolicy::purely_random(1), net, 1).tau == 1);
  }
  SUBCASE("deterministic cycle visits one new ball per step") {
    const auto mdp = cycle_mdp(1);
    const auto run = measure_cover_time(mdp, ExplorationPolicy::purely_random(1), cycle_net(), 3,
                                        {.start_state = Point{0.0}});
    CHECK(run.tau == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(run.first_visit[i] == i + 1);
  }
  SUBCASE("step cap") {
    const auto mdp = make_uniform_mixing(0.5);
    const auto net = build_grid_hnet(Box::unit(1), 0.1);
    try {
      measure_cover_time(mdp, ExplorationPolicy::purely_random(2), net, 1, {.step_cap = 3});
      FAIL("expected CoverTimeExceeded");
    } catch (const CoverTimeExceeded& e) {
      CHECK(e.total() == 22);
      CHECK(e.covered() < 22);
    }
  }
}

TEST_CASE("logged trajectory replays to the same first-visit times") {
  const auto mdp = make_uniform_mixing(0.5);
  const auto net = build_grid_hnet(Box::unit(1), 0.1);
  const auto run = measure_cover_time(mdp, ExplorationPolicy::purely_random(2), net, 11,
                                      {.log_trajectory = true});
  REQUIRE(run.states.size() == run.tau);
  std::vector<std::uint64_t> replay(net.size() * 2, 0);
  for (std::size_t t = 0; t < run.tau; ++t)
    for (std::size_t i : balls_containing(net, run.states[t]).indices)
      if (replay[i * 2 + run.actions[t]] == 0) replay[i * 2 + run.actions[t]] = t + 1;
  CHECK(replay == run.first_visit);
  CHECK(*std::max_element(replay.begin(), replay.end()) == run.tau);
}

TEST_CASE("count_covers on the deterministic cycle") {
  const auto mdp = cycle_mdp(1);
  const auto policy = ExplorationPolicy::purely_random(1);
  CHECK(count_covers(mdp, policy, cycle_net(), 1, 15, Point{0.0}) == 3);
  CHECK(count_covers(mdp, policy, cycle_net(), 1, 14, Point{0.0}) == 2);
  CHECK(count_covers(mdp, policy, cycle_net(), 1, 4, Point{0.0}) == 0);
}

TEST_CASE("epsilon-greedy action frequencies") {
  const ValueSource prefer_one = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    out[1] = 1.0;
  };
  const Point x{0.5};
  constexpr int kDraws = 100'000;
  SUBCASE("eps = 1 is uniform") {
    const auto policy = ExplorationPolicy::epsilon_greedy(1.0, 4, prefer_one);
    Rng rng(5);
    std::vector<int> hits(4, 0);
    for (int i = 0; i < kDraws; ++i) ++hits[policy.choose(x, rng)];
    for (int h : hits) CHECK(std::abs(h / double(kDraws) - 0.25) < 0.01);
  }
  SUBCASE("eps = 0.5 with two actions picks the greedy one 3/4 of the time") {
    const auto policy = ExplorationPolicy::epsilon_greedy(0.5, 2, prefer_one);
    Rng rng(6);
    int greedy_hits = 0;
    for (int i = 0; i < kDraws; ++i) greedy_hits += policy.choose(x, rng) == 1;
    CHECK(std::abs(greedy_hits / double(kDraws) - 0.75) < 0.02);
  }
  SUBCASE("ties go to the lowest index") {
    const auto policy = ExplorationPolicy::epsilon_greedy(
        0.1, 3, [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 1.0); });
    CHECK(policy.greedy(x) == 0);
  }
  CHECK_THROWS_AS(ExplorationPolicy::purely_random(2).greedy(x), std::logic_error);
}

TEST_CASE("table-driven policy is greedy on the table") {
  auto net = std::make_shared<const HNet>(build_grid_hnet(Box::unit(1), 0.5));
  auto q = std::make_shared<QTable>(net, std::vector<std::string>{"a0", "a1"});
  (*q)(0, 1) = 1.0;
  (*q)(2, 0) = 1.0;
  const auto policy = epsilon_greedy_policy(0.1, q, {KernelKind::OneNN, 0.5});
  CHECK(policy.greedy(Point{0.0}) == 1);
  CHECK(policy.greedy(Point{1.0}) == 0);
}

TEST_CASE("less exploration covers more slowly") {
  const auto mdp = make_uniform_mixing(0.5);
  const auto net = build_partition_hnet(Box::unit(1), 5);
  const ValueSource always_zero = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  auto mean_tau = [&](double eps) {
    const auto policy = ExplorationPolicy::epsilon_greedy(eps, 2, always_zero);
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 300; ++s) sum += measure_cover_time(mdp, policy, net, s).tau;
    return sum / 300.0;
  };
  const double fast = mean_tau(1.0), slow = mean_tau(0.2);
  CHECK(slow > fast);
  CHECK(fast == doctest::Approx(coupon_collector_mean(10)).epsilon(0.1));
}

TEST_CASE("covering formulas") {
  CHECK(coupon_collector_mean(1) == 1.0);
  CHECK(coupon_collector_mean(2) == doctest::Approx(3.0));
  // 20 H_20, frozen from an exact rational evaluation.
  CHECK(coupon_collector_mean(20) == doctest::Approx(71.95479314287).epsilon(1e-12));

  const ErgodicityDecl decl{1, 1.0, 0.1};
  CHECK(cover_bound(decl, 10, 2, 1.0) == doctest::Approx(20.0 * std::log(20.0)).epsilon(1e-14));
  CHECK(cover_bound(decl, 10, 2, 1.0) == doctest::Approx(59.9146).epsilon(1e-5));
  CHECK(cover_bound({1, 1.0, 0.05}, 10, 2, 1.0) == doctest::Approx(2 * cover_bound(decl, 10, 2, 1.0)));
  CHECK(cover_bound(decl, 10, 2, 0.5) == doctest::Approx(2 * cover_bound(decl, 10, 2, 1.0)));

  // 8 * 4 * 60 * ln 10 = 4420.96
  CHECK(horizon_for_k_covers(4, 60.0, 0.1) == 4421);
  CHECK(horizon_for_k_covers(8, 60.0, 0.1) == doctest::Approx(2 * 4421).epsilon(1e-3));
  CHECK_THROWS_AS(horizon_for_k_covers(3, 60.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(horizon_for_k_covers(4, 60.0, 0.5), std::domain_error);
}
