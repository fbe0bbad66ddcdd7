#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnql/hnet.hpp"
#include "nnql/qtable.hpp"

namespace nnql {

enum class KernelKind { OneNN, FixedRadius, TruncatedGaussian };

/// Weighting rule for the nearest-neighbor extension. The bandwidth must be
/// the companion net's radius.
struct KernelSpec {
  KernelKind kind = KernelKind::OneNN;
  double bandwidth = 0.0;
};

/// "one-nn" | "fixed-radius" | "gaussian"
KernelKind parse_kernel(std::string_view name);
std::string_view kernel_name(KernelKind kind);

struct WeightEntry {
  std::size_t index;
  double weight;
};

/// Sparse normalized weights over centers, all within distance h of x.
struct Weights {
  std::vector<WeightEntry> entries;

  double sum() const;
};

/// Normalized kernel weights K(x, c_i). Ties for OneNN go to the lowest index.
/// Throws std::logic_error when no center lies within h of x, and
/// std::invalid_argument when the bandwidth disagrees with the net.
Weights kernel_weights(std::span<const double> x, const HNet& net, const KernelSpec& kernel);
void kernel_weights(std::span<const double> x, const HNet& net, const KernelSpec& kernel,
                    Weights& out);

/// (Gamma_NN q)(x, a).
double nn_extend(const QTable& q, std::span<const double> x, std::size_t action,
                 const KernelSpec& kernel);

/// (Gamma_NN q)(x, b) for every action b, sharing one weight computation.
void nn_extend_all(const QTable& q, std::span<const double> x, const KernelSpec& kernel,
                   std::span<double> out, Weights& scratch);

/// max_b (Gamma_NN q)(x, b).
double nn_max_extend(const QTable& q, std::span<const double> x, const KernelSpec& kernel);

}  // namespace nnql
