#include "nnql/sa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nnql {

SaBoundParams SaBoundParams::from_gamma(double gamma, double m_noise, double v_bound,
                                        double delta1, double delta2) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in (0,1)");
  return SaBoundParams{delta1, delta2, m_noise, v_bound, gamma, 1.0 / (1.0 - gamma)};
}

double step_size(std::uint64_t k, double beta) {
  return beta / (beta + static_cast<double>(k));
}

SaIterate sa_step(const SaIterate& iterate, std::span<const double> f_value,
                  std::span<const double> noise, double alpha) {
  const std::size_t d = iterate.theta.size();
  if (f_value.size() != d || noise.size() != d)
    throw std::invalid_argument("sa_step: dimension mismatch");
  SaIterate next{iterate.theta, iterate.t + 1};
  for (std::size_t i = 0; i < d; ++i)
    next.theta[i] += alpha * (f_value[i] - iterate.theta[i] + noise[i]);
  return next;
}

std::uint64_t predicted_sa_iterations(double eps, double delta, const SaBoundParams& p,
                                      std::size_t d_sa) {
  const double beta = p.beta;
  const double upper = std::min(2.0 * p.v_bound * beta, 2.0 * p.m_noise * beta * beta);
  if (!(eps > 0.0 && eps < upper))
    throw std::domain_error("eps outside (0, min(2 V beta, 2 M beta^2))");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  if (d_sa == 0) throw std::domain_error("dimension must be positive");
  const double m2b4 = p.m_noise * p.m_noise * std::pow(beta, 4);
  const double lead = 48.0 * p.v_bound * m2b4 / (eps * eps * eps);
  const double log_arg = 32.0 * static_cast<double>(d_sa) * m2b4 / (delta * eps * eps);
  const double tail = 6.0 * p.v_bound * (beta - 1.0) / eps;
  return static_cast<std::uint64_t>(std::ceil(lead * std::log(log_arg) + tail));
}

std::vector<SaSeedResult> run_affine_harness(const AffineHarnessConfig& cfg) {
  const double m_bound = cfg.m_declared.value_or(cfg.noise.m_noise);
  const auto params = SaBoundParams::from_gamma(cfg.gamma, m_bound, cfg.v_bound,
                                                cfg.noise.delta1, cfg.noise.delta2);
  const std::size_t d = cfg.b.size();
  if (d == 0) throw std::invalid_argument("affine harness needs a non-empty b");
  std::vector<double> fixed(d);
  for (std::size_t i = 0; i < d; ++i) fixed[i] = cfg.b[i] / (1.0 - cfg.gamma);
  for (double v : fixed) {
    if (std::abs(v) > cfg.v_bound)
      throw std::invalid_argument("fixed point b / (1 - gamma) exceeds the iterate bound V");
  }
  const std::uint64_t T = predicted_sa_iterations(cfg.eps, cfg.delta, params, d);
  const double bound =
      params.beta * (cfg.noise.delta1 + cfg.noise.delta2 * cfg.v_bound) + cfg.eps;

  std::vector<SaSeedResult> out;
  out.reserve(cfg.seeds.size());
  std::vector<double> f(d), w(d);
  for (std::uint64_t seed : cfg.seeds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centered(-cfg.noise.m_noise, cfg.noise.m_noise);
    SaIterate it{std::vector<double>(d, 0.0), 0};
    for (std::uint64_t t = 0; t < T; ++t) {
      double sup = 0.0;
      for (double v : it.theta) sup = std::max(sup, std::abs(v));
      const double bias = cfg.noise.bias == BiasMode::Constant
                              ? cfg.noise.delta1
                              : cfg.noise.delta1 + cfg.noise.delta2 * sup;
      for (std::size_t i = 0; i < d; ++i) {
        f[i] = cfg.gamma * it.theta[i] + cfg.b[i];
        w[i] = bias + (cfg.noise.m_noise > 0.0 ? centered(rng) : 0.0);
      }
      // In-place form of sa_step; avoids a vector copy per iteration.
      const double alpha = step_size(t, params.beta);
      for (std::size_t i = 0; i < d; ++i) it.theta[i] += alpha * (f[i] - it.theta[i] + w[i]);
      ++it.t;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) err = std::max(err, std::abs(it.theta[i] - fixed[i]));
    out.push_back({seed, err, bound, T});
  }
  return out;
}

}  // namespace nnql
