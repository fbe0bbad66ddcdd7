#include <doctest.h>

#include <stdexcept>

#include <array>
#include <cmath>

#include "nnql/mdp.hpp"

using namespace nnql;

namespace {

MdpSpec with_constants(double gamma, double r_max, double m_r, double m_p) {
  MdpSpec::Definition def;
  def.bounds = Box::unit(1);
  def.actions = {"a"};
  def.gamma = gamma;
  def.r_max = r_max;
  def.m_r = m_r;
  def.m_p = m_p;
  def.transition_sampler = [](std::span<const double> x, std::size_t, Rng&) {
    return Point(x.begin(), x.end());
  };
  def.reward_sampler = [](std::span<const double>, std::size_t, Rng&) { return 0.0; };
  return MdpSpec(std::move(def));
}

}  // namespace

TEST_CASE("derived constants follow their definitions") {
  auto c = derived_constants(with_constants(0.5, 1.0, 1.0, 0.0));
  CHECK(c.beta == 2.0);
  CHECK(c.v_max == 2.0);
  CHECK(c.lip_c == 1.0);

  c = derived_constants(with_constants(0.9, 1.0, 0.0, 0.0));
  CHECK(c.beta == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.v_max == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.lip_c == 0.0);

  c = derived_constants(with_constants(0.5, 2.0, 1.0, 0.5));
  CHECK(c.beta == 2.0);
  CHECK(c.v_max == 4.0);
  CHECK(c.lip_c == 2.0);

  const auto spec = with_constants(0.7, 1.3, 0.2, 0.4);
  const auto a = derived_constants(spec);
  const auto b = derived_constants(spec);
  CHECK(a.beta == b.beta);
  CHECK(a.v_max == b.v_max);
  CHECK(a.lip_c == b.lip_c);
  CHECK(a.beta > 1.0);
}

TEST_CASE("MDP construction rejects invalid declarations") {
  CHECK_THROWS_AS(with_constants(1.0, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(with_constants(0.0, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(with_constants(0.5, -1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_mixing(1.2), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_mixing(0.0), std::invalid_argument);
}

TEST_CASE("uniform mixing declares a constant transition density") {
  const auto mdp = make_uniform_mixing(0.5);
  CHECK(mdp.m_p() == 0.0);
  CHECK(derived_constants(mdp).lip_c == 1.0);
  CHECK(mdp.expected_reward(Point{0.3}, 1) == doctest::Approx(0.3));

  const auto flat = make_uniform_mixing(0.5, RewardFunction::constant(1.0));
  CHECK(derived_constants(flat).lip_c == 0.0);
}

TEST_CASE("uniform mixing next states and rewards match the declared laws") {
  const auto mdp = make_uniform_mixing(0.5);
  Rng rng(7);
  constexpr int kN = 100'000;
  double mean_next = 0.0;
  double mean_reward = 0.0;
  std::array<int, 10> bins{};
  const Point x{0.3};
  for (int i = 0; i < kN; ++i) {
    const auto rec = step(mdp, x, static_cast<std::size_t>(i % 2), rng);
    mean_next += rec.next_state[0];
    mean_reward += rec.reward;
    bins[std::min<std::size_t>(9, static_cast<std::size_t>(rec.next_state[0] * 10))]++;
  }
  mean_next /= kN;
  mean_reward /= kN;
  CHECK(std::abs(mean_next - 0.5) <= 0.01);
  CHECK(mean_reward >= 0.29);
  CHECK(mean_reward <= 0.31);
  for (int count : bins) {
    CHECK(count >= 8'000);
    CHECK(count <= 12'000);
  }
}

TEST_CASE("sampled transitions stay inside the declared bounds") {
  for (const auto& mdp : {make_uniform_mixing(0.5), make_uniform_mixing(0.9, RewardFunction::first_coordinate(), 2),
                          make_drift_1d(0.5)}) {
    Rng rng(11);
    for (int i = 0; i < 10'000; ++i) {
      const Point x = sample_uniform(mdp.bounds(), rng);
      const auto rec = step(mdp, x, static_cast<std::size_t>(i) % mdp.n_actions(), rng);
      REQUIRE(rec.reward >= 0.0);
      REQUIRE(rec.reward <= mdp.r_max());
      REQUIRE(mdp.bounds().contains(rec.next_state));
    }
  }
}

TEST_CASE("step rejects states outside the box and unknown actions") {
  const auto mdp = make_uniform_mixing(0.5);
  Rng rng(1);
  CHECK_THROWS_AS(step(mdp, Point{1.5}, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(step(mdp, Point{0.5, 0.5}, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(step(mdp, Point{0.5}, 2, rng), std::out_of_range);
}

TEST_CASE("drift benchmark: rewards and clamping at the boundary") {
  const auto mdp = make_drift_1d(0.5);
  CHECK(mdp.expected_reward(Point{0.5}, 0) == 1.0);
  CHECK(mdp.expected_reward(Point{0.0}, 1) == 0.5);
  CHECK(mdp.expected_reward(Point{1.0}, 0) == 0.5);
  Rng rng(3);
  bool hit_edge = false;
  for (int i = 0; i < 1000; ++i) {
    const auto rec = step(mdp, Point{0.0}, 0, rng);
    CHECK(rec.next_state[0] >= 0.0);
    CHECK(rec.next_state[0] <= 1.0);
    hit_edge = hit_edge || rec.next_state[0] == 0.0;
  }
  CHECK(hit_edge);
  // Quadrature weights form a probability vector.
  double total = 0.0;
  for (const auto& node : mdp.transition_nodes(Point{0.2}, 1, 101)) total += node.w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
