#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "nnql/sa.hpp"

using namespace nnql;

TEST_CASE("step size schedule") {
  CHECK(step_size(0, 2.0) == 1.0);
  CHECK(step_size(1, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(step_size(4, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (double beta : {1.5, 2.0, 10.0}) {
    CHECK(step_size(0, beta) == 1.0);
    for (std::uint64_t k = 0; k < 1000; ++k) REQUIRE(step_size(k + 1, beta) < step_size(k, beta));
  }
}

TEST_CASE("sa_step arithmetic") {
  const SaIterate it{{1.0, 1.0}, 3};
  const std::vector<double> f{0.5, 0.5};
  const std::vector<double> w{0.1, -0.1};
  const auto still = sa_step(it, f, w, 0.0);
  CHECK(still.theta == it.theta);
  CHECK(still.t == 4);

  const std::vector<double> zero{0.0, 0.0};
  CHECK(sa_step(it, f, zero, 1.0).theta == f);

  const auto half = sa_step(it, f, w, 0.5);
  CHECK(half.theta[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(half.theta[1] == doctest::Approx(0.7).epsilon(1e-15));

  CHECK_THROWS_AS(sa_step(it, std::vector<double>{1.0}, w, 0.5), std::invalid_argument);
}

TEST_CASE("predicted iteration count") {
  const auto p = SaBoundParams::from_gamma(0.5, 4.0, 2.0);
  CHECK(p.beta == 2.0);
  // Frozen from an independent 40-digit evaluation:
  // 24576 ln(81920) + 12 = 278052.5377
  CHECK(predicted_sa_iterations(1.0, 0.1, p, 1) == 278'053);

  const double upper = std::min(2.0 * 2.0 * 2.0, 2.0 * 4.0 * 4.0);
  const auto near_limit = predicted_sa_iterations(upper * (1 - 1e-9), 0.1, p, 1);
  CHECK(near_limit > 0);
  CHECK_THROWS_AS(predicted_sa_iterations(upper, 0.1, p, 1), std::domain_error);
  CHECK_THROWS_AS(predicted_sa_iterations(0.0, 0.1, p, 1), std::domain_error);

  const double ratio = static_cast<double>(predicted_sa_iterations(1.0, 0.1, p, 1)) /
                       static_cast<double>(predicted_sa_iterations(2.0, 0.1, p, 1));
  CHECK(ratio > 8.0);
  CHECK(ratio < 8.0 * std::log(81920.0) / std::log(20480.0) + 0.01);
}

TEST_CASE("affine harness without noise converges to b / (1 - gamma)") {
  AffineHarnessConfig cfg;
  cfg.gamma = 0.5;
  cfg.b = {1.0};
  cfg.v_bound = 2.0;
  cfg.m_declared = 4.0;
  cfg.eps = 1.0;
  cfg.delta = 0.1;
  cfg.seeds = {1, 2};
  const auto results = run_affine_harness(cfg);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK(r.final_error <= 1.0);
    CHECK(r.final_error < 1e-4);
    CHECK(r.bound == 1.0);
    CHECK(r.iterations == 278'053);
  }
}

TEST_CASE("affine harness rejects a fixed point beyond V") {
  AffineHarnessConfig cfg;
  cfg.gamma = 0.5;
  cfg.b = {2.0};
  cfg.v_bound = 2.0;
  cfg.noise.m_noise = 4.0;
  cfg.seeds = {1};
  CHECK_THROWS_AS(run_affine_harness(cfg), std::invalid_argument);
}

TEST_CASE("proportional bias widens the bound by beta delta2 V") {
  AffineHarnessConfig cfg;
  cfg.gamma = 0.5;
  cfg.b = {0.5, -0.5};
  cfg.v_bound = 2.0;
  cfg.noise = {4.0, 0.0, 0.02, BiasMode::Proportional};
  cfg.eps = 1.5;
  cfg.seeds = {9};
  const auto r = run_affine_harness(cfg).front();
  CHECK(r.bound == doctest::Approx(2.0 * 0.02 * 2.0 + 1.5));
  CHECK(r.final_error <= r.bound);
}
