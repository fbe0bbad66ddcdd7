#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nnql {

/// theta^t of theta <- theta + alpha (F(theta) - theta + w).
struct SaIterate {
  std::vector<double> theta;
  std::uint64_t t = 0;
};

struct SaBoundParams {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double m_noise = 0.0;
  double v_bound = 0.0;
  double gamma = 0.5;
  double beta = 2.0;

  static SaBoundParams from_gamma(double gamma, double m_noise, double v_bound,
                                  double delta1 = 0.0, double delta2 = 0.0);
};

/// beta / (beta + k).
double step_size(std::uint64_t k, double beta);

SaIterate sa_step(const SaIterate& iterate, std::span<const double> f_value,
                  std::span<const double> noise, double alpha);

/// Iterations after which the biased SA iterate is within
/// beta (delta1 + delta2 V) + eps of the fixed point with probability 1 - delta.
/// Throws std::domain_error unless 0 < eps < min(2 V beta, 2 M beta^2).
std::uint64_t predicted_sa_iterations(double eps, double delta, const SaBoundParams& params,
                                      std::size_t d_sa);

enum class BiasMode {
  Constant,      // Delta = delta1 on every coordinate
  Proportional,  // Delta = (delta1 + delta2 |theta|_inf) on every coordinate
};

struct NoiseModel {
  double m_noise = 0.0;  // centered part is uniform on [-M, M]
  double delta1 = 0.0;
  double delta2 = 0.0;
  BiasMode bias = BiasMode::Constant;
};

struct AffineHarnessConfig {
  double gamma = 0.5;
  std::vector<double> b;
  NoiseModel noise;
  double v_bound = 0.0;
  // Noise bound M fed to the iteration count; defaults to noise.m_noise.
  std::optional<double> m_declared;
  double eps = 1.0;
  double delta = 0.1;
  std::vector<std::uint64_t> seeds;
};

struct SaSeedResult {
  std::uint64_t seed = 0;
  double final_error = 0.0;
  double bound = 0.0;  // beta (delta1 + delta2 V) + eps
  std::uint64_t iterations = 0;
};

/// Runs the affine contraction F(theta) = gamma theta + b for the predicted
/// number of iterations per seed and reports |theta^T - b / (1 - gamma)|_inf.
std::vector<SaSeedResult> run_affine_harness(const AffineHarnessConfig& config);

}  // namespace nnql
