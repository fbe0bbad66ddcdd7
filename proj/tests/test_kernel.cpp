#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <memory>

#include "nnql/kernel.hpp"
#include "nnql/oracle.hpp"

using namespace nnql;

namespace {

std::shared_ptr<const HNet> three_centers() {
  return std::make_shared<const HNet>(build_grid_hnet(Box::unit(1), 0.5));
}

// Direct evaluation of the three weighting rules, independent of kernel.cpp.
std::vector<double> brute_weights(const HNet& net, const Point& x, KernelKind kind) {
  std::vector<double> w(net.size(), 0.0);
  if (kind == KernelKind::OneNN) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < net.size(); ++i)
      if (distance(x, net.center(i)) < distance(x, net.center(best))) best = i;
    w[best] = 1.0;
    return w;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double r = distance(x, net.center(i));
    if (r <= net.h()) {
      w[i] = kind == KernelKind::FixedRadius ? 1.0 : std::exp(-r * r / (2 * net.h() * net.h()));
      total += w[i];
    }
  }
  for (double& v : w) v /= total;
  return w;
}

QTable random_table(std::shared_ptr<const HNet> net, std::size_t n_actions, Rng& rng, double scale) {
  std::vector<std::string> actions;
  for (std::size_t a = 0; a < n_actions; ++a) actions.push_back("a" + std::to_string(a));
  QTable q(std::move(net), actions);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : q.values()) v = u(rng);
  return q;
}

constexpr KernelKind kAllKernels[] = {KernelKind::OneNN, KernelKind::FixedRadius,
                                      KernelKind::TruncatedGaussian};

}  // namespace

TEST_CASE("kernel names parse both ways") {
  for (auto k : kAllKernels) CHECK(parse_kernel(kernel_name(k)) == k);
  CHECK_THROWS_AS(parse_kernel("epanechnikov"), std::invalid_argument);
}

TEST_CASE("weights for the three-center configuration") {
  const auto net = three_centers();
  const auto one = kernel_weights(Point{0.5}, *net, {KernelKind::OneNN, 0.5});
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].index == 1);
  CHECK(one.entries[0].weight == 1.0);

  for (auto kind : {KernelKind::FixedRadius, KernelKind::TruncatedGaussian}) {
    const auto w = kernel_weights(Point{0.25}, *net, {kind, 0.5});
    REQUIRE(w.entries.size() == 2);
    CHECK(w.entries[0].index == 0);
    CHECK(w.entries[1].index == 1);
    CHECK(w.entries[0].weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.entries[1].weight == doctest::Approx(0.5).epsilon(1e-15));
  }
  // Equidistant centers: the lower index wins.
  const auto tie = kernel_weights(Point{0.25}, *net, {KernelKind::OneNN, 0.5});
  CHECK(tie.entries[0].index == 0);
}

TEST_CASE("bandwidth must match the net") {
  const auto net = three_centers();
  CHECK_THROWS_AS(kernel_weights(Point{0.3}, *net, {KernelKind::OneNN, 0.4}), std::invalid_argument);
  HNet sparse(Box::unit(1), 0.1, {Point{0.0}});
  CHECK_THROWS_AS(kernel_weights(Point{0.5}, sparse, {KernelKind::FixedRadius, 0.1}), std::logic_error);
  CHECK_THROWS_AS(kernel_weights(Point{0.5}, sparse, {KernelKind::OneNN, 0.1}), std::logic_error);
}

TEST_CASE("nn_extend examples") {
  const auto net = three_centers();
  QTable seven(net, {"a0", "a1"}, 7.0);
  for (auto kind : kAllKernels)
    for (double x : {0.0, 0.1, 0.33, 0.77, 1.0})
      CHECK(nn_extend(seven, Point{x}, 1, {kind, 0.5}) == doctest::Approx(7.0).epsilon(1e-12));

  QTable q(net, {"a0", "a1"});
  q(1, 0) = 2.5;
  CHECK(nn_extend(q, Point{0.5}, 0, {KernelKind::OneNN, 0.5}) == 2.5);

  QTable r(net, {"a0"});
  r(0, 0) = 0.0;
  r(1, 0) = 4.0;
  CHECK(nn_extend(r, Point{0.25}, 0, {KernelKind::FixedRadius, 0.5}) == doctest::Approx(2.0));
}

TEST_CASE("nn_max_extend takes the best action value") {
  const auto net = three_centers();
  QTable q(net, {"a0", "a1"});
  for (std::size_t i = 0; i < 3; ++i) {
    q(i, 0) = 1.0;
    q(i, 1) = 3.0;
  }
  CHECK(nn_max_extend(q, Point{0.4}, {KernelKind::FixedRadius, 0.5}) == doctest::Approx(3.0));
  QTable zero(net, {"a0", "a1"});
  CHECK(nn_max_extend(zero, Point{0.9}, {KernelKind::TruncatedGaussian, 0.5}) == 0.0);
}

TEST_CASE("extension of q*_h agrees with explicit weight enumeration") {
  auto mdp = std::make_shared<const MdpSpec>(make_uniform_mixing(0.5));
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp->bounds(), 0.1));
  for (auto kind : kAllKernels) {
    const KernelSpec kernel{kind, 0.1};
    const auto fp = fixed_point_qh(GApplier(mdp, net, kernel, Quadrature{2000}), 1e-10);
    for (double x : {0.0, 0.031, 0.25, 0.5, 0.666, 0.95, 1.0}) {
      const auto w = brute_weights(*net, Point{x}, kind);
      double expected = -1e300;
      for (std::size_t a = 0; a < 2; ++a) {
        double v = 0.0;
        for (std::size_t i = 0; i < net->size(); ++i) v += w[i] * fp.q(i, a);
        expected = std::max(expected, v);
      }
      CHECK(nn_max_extend(fp.q, Point{x}, kernel) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: weights are normalized and supported within h") {
  for (std::size_t d : {1u, 2u}) {
    const auto net = build_grid_hnet(Box::unit(d), 0.15);
    for (auto kind : kAllKernels) {
      const KernelSpec kernel{kind, net.h()};
      Rng rng(42 + d);
      Weights w;
      for (int i = 0; i < 10'000; ++i) {
        const Point x = sample_uniform(net.bounds(), rng);
        kernel_weights(x, net, kernel, w);
        REQUIRE(std::abs(w.sum() - 1.0) <= 1e-12);
        for (const auto& e : w.entries) {
          REQUIRE(e.weight >= 0.0);
          REQUIRE(distance(x, net.center(e.index)) <= net.h());
        }
      }
    }
  }
}

TEST_CASE("property: nearest-neighbor extension is non-expansive") {
  auto net = std::make_shared<const HNet>(build_grid_hnet(Box::unit(2), 0.2));
  Rng rng(2024);
  Weights scratch;
  std::vector<double> ep(3), eq(3);
  for (auto kind : kAllKernels) {
    const KernelSpec kernel{kind, net->h()};
    for (int pair = 0; pair < 100; ++pair) {
      const QTable p = random_table(net, 3, rng, 5.0);
      const QTable q = random_table(net, 3, rng, 5.0);
      const double table_gap = sup_distance(p, q);
      for (int probe = 0; probe < 50; ++probe) {
        const Point x = sample_uniform(net->bounds(), rng);
        nn_extend_all(p, x, kernel, ep, scratch);
        nn_extend_all(q, x, kernel, eq, scratch);
        for (std::size_t a = 0; a < 3; ++a) REQUIRE(std::abs(ep[a] - eq[a]) <= table_gap + 1e-12);
      }
    }
  }
}
