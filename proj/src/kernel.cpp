#include "nnql/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nnql {

KernelKind parse_kernel(std::string_view name) {
  if (name == "one-nn") return KernelKind::OneNN;
  if (name == "fixed-radius") return KernelKind::FixedRadius;
  if (name == "gaussian") return KernelKind::TruncatedGaussian;
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected one-nn, fixed-radius or gaussian)");
}

std::string_view kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::OneNN: return "one-nn";
    case KernelKind::FixedRadius: return "fixed-radius";
    case KernelKind::TruncatedGaussian: return "gaussian";
  }
  return "unknown";
}

double Weights::sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight;
  return s;
}

void kernel_weights(std::span<const double> x, const HNet& net, const KernelSpec& kernel,
                    Weights& out) {
  if (kernel.bandwidth != net.h())
    throw std::invalid_argument("kernel bandwidth must equal the net radius");
  out.entries.clear();
  const double h = net.h();

  if (kernel.kind == KernelKind::OneNN) {
    std::size_t best = net.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < net.size(); ++i) {
      const double d = distance(x, net.center(i));
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best == net.size() || best_d > h)
      throw std::logic_error("no center within h of the query point");
    out.entries.push_back({best, 1.0});
    return;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double d = distance(x, net.center(i));
    if (d > h) continue;
    double w = 1.0;
    if (kernel.kind == KernelKind::TruncatedGaussian) {
      const double s = d / h;
      w = std::exp(-0.5 * s * s);
    }
    out.entries.push_back({i, w});
    total += w;
  }
  if (out.entries.empty()) throw std::logic_error("no center within h of the query point");
  for (auto& e : out.entries) e.weight /= total;
}

Weights kernel_weights(std::span<const double> x, const HNet& net, const KernelSpec& kernel) {
  Weights w;
  kernel_weights(x, net, kernel, w);
  return w;
}

double nn_extend(const QTable& q, std::span<const double> x, std::size_t action,
                 const KernelSpec& kernel) {
  if (action >= q.n_actions()) throw std::out_of_range("action index out of range");
  const Weights w = kernel_weights(x, q.net(), kernel);
  double v = 0.0;
  for (const auto& e : w.entries) v += e.weight * q(e.index, action);
  return v;
}

void nn_extend_all(const QTable& q, std::span<const double> x, const KernelSpec& kernel,
                   std::span<double> out, Weights& scratch) {
  kernel_weights(x, q.net(), kernel, scratch);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : scratch.entries) {
    for (std::size_t a = 0; a < q.n_actions(); ++a) out[a] += e.weight * q(e.index, a);
  }
}

double nn_max_extend(const QTable& q, std::span<const double> x, const KernelSpec& kernel) {
  Weights scratch;
  std::vector<double> values(q.n_actions());
  nn_extend_all(q, x, kernel, values, scratch);
  return *std::max_element(values.begin(), values.end());
}

}  // namespace nnql
