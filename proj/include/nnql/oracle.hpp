#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "nnql/hnet.hpp"
#include "nnql/kernel.hpp"
#include "nnql/mdp.hpp"
#include "nnql/qtable.hpp"

namespace nnql {

/// Deterministic expectation through the MDP's transition quadrature.
/// For box-uniform transitions n_nodes is the midpoint count per axis.
struct Quadrature {
  std::size_t n_nodes = 10'000;
};

struct MonteCarlo {
  std::size_t n_samples = 1'000;
  std::uint64_t seed = 0;
};

using Integration = std::variant<Quadrature, MonteCarlo>;

/// The joint Bellman/nearest-neighbor operator
///   (Gq)(c_i, a) = r(c_i, a) + gamma E[max_b (Gamma_NN q)(x', b) | c_i, a].
struct GApplier {
  std::shared_ptr<const MdpSpec> mdp;
  std::shared_ptr<const HNet> net;
  KernelSpec kernel;
  Integration integration = Quadrature{};

  GApplier(std::shared_ptr<const MdpSpec> mdp, std::shared_ptr<const HNet> net, KernelSpec kernel,
           Integration integration = Quadrature{});
};

struct GResult {
  QTable q;
  double max_std_error = 0.0;  // zero for quadrature
};

QTable apply_G(const GApplier& applier, const QTable& q);
GResult apply_G_detailed(const GApplier& applier, const QTable& q);

struct FixedPointResult {
  QTable q;
  std::vector<double> sweep_changes;
};

/// Iterates q <- Gq from zero until a sweep moves q by at most
/// tol (1 - gamma) / gamma, which bounds the distance to the fixed point by tol.
FixedPointResult fixed_point_qh(const GApplier& applier, double tol,
                                std::size_t max_sweeps = 10'000);

/// Q*(x, a) = r(x) + gamma / (1 - gamma) * integral of r, for uniform-mixing MDPs.
class UniformMixingQStar {
 public:
  explicit UniformMixingQStar(const MdpSpec& mdp);

  double operator()(std::span<const double> x, std::size_t action) const;
  double reward_integral() const { return integral_; }

 private:
  RewardFunction reward_;
  double gamma_;
  double integral_;
};

double analytic_qstar_uniform_mixing(const MdpSpec& mdp, std::span<const double> x,
                                     std::size_t action);

/// Integral of f over the box by composite 5-point Gauss-Legendre.
double integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box,
                     std::size_t panels_per_axis);

/// Reference Q* from value iteration on a fine grid with multilinear
/// interpolation between grid points (d <= 2).
class GridQStar {
 public:
  double operator()(std::span<const double> x, std::size_t action) const;

  std::size_t dim() const { return axes_.size(); }
  std::size_t n_actions() const { return n_actions_; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  /// Value at grid point (row-major over axes) for action a.
  double at(std::size_t point, std::size_t action) const {
    return values_[point * n_actions_ + action];
  }
  std::size_t n_points() const { return values_.size() / n_actions_; }
  double residual() const { return residual_; }
  std::size_t sweeps() const { return sweeps_; }

 private:
  friend GridQStar grid_qstar(const MdpSpec&, double, double, std::size_t, std::size_t);
  std::vector<std::vector<double>> axes_;
  std::size_t n_actions_ = 0;
  std::vector<double> values_;
  double residual_ = 0.0;
  std::size_t sweeps_ = 0;
};

/// Throws std::invalid_argument for d > 2 and std::length_error when the
/// grid exceeds `point_budget` points or the sweep cap is hit.
GridQStar grid_qstar(const MdpSpec& mdp, double fine_h, double tol,
                     std::size_t quad_resolution = 201, std::size_t point_budget = 1'000'000);

using QFunction = std::function<double(std::span<const double>, std::size_t)>;

/// max over probes and actions of |estimate - reference|.
double sup_error(const QFunction& estimate, const QFunction& reference,
                 std::span<const Point> probes, std::size_t n_actions);

struct HStar {
  double h = 0.0;
  bool degenerate = false;  // C == 0: any h works, `h` is the fallback
};

/// eps / (4 beta C). eps must lie in (0, 4 V_max beta).
HStar h_star(double eps, const DerivedConstants& constants, double fallback_h = 0.1);

struct PlannerInputs {
  double eps = 1.0;
  double delta = 0.1;
  double l_cover = 1.0;
  std::uint64_t n_centers = 1;
  std::size_t n_actions = 1;
  DerivedConstants constants;
  double c0 = 1.0;
};

/// C0 L V^3 beta^4 / eps^3 log(2 / delta) log(N |A| V^2 beta^4 / (delta eps^2)), rounded up.
std::uint64_t sample_complexity_T(const PlannerInputs& inputs);

/// beta C h.
double discretization_bound(double h, const DerivedConstants& constants);

}  // namespace nnql
