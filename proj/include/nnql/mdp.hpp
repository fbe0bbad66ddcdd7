#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nnql {

using Point = std::vector<double>;
using Rng = std::mt19937_64;

/// Axis-aligned compact box in R^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box unit(std::size_t d);

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const;
  Point clamp(std::span<const double> x) const;
  double side(std::size_t axis) const { return hi[axis] - lo[axis]; }
};

/// Euclidean metric on states.
double distance(std::span<const double> x, std::span<const double> y);

/// A node of a quadrature rule for the next-state law: E[f(x')] ~ sum w f(x').
struct WeightedPoint {
  Point x;
  double w;
};

enum class MdpKind { UniformMixing, Drift1d, Custom };

/// Declared Lipschitz function r(x) used to build reward models.
struct RewardFunction {
  std::function<double(std::span<const double>)> eval;
  double lipschitz = 0.0;
  std::string label;

  /// r(x) = x_1, values in [0,1] on the unit box.
  static RewardFunction first_coordinate();
  static RewardFunction constant(double value);
};

struct TransitionRecord {
  Point state;
  std::size_t action = 0;
  double reward = 0.0;
  Point next_state;
};

struct DerivedConstants {
  double beta = 0.0;
  double v_max = 0.0;
  double lip_c = 0.0;
};

/// Sampleable continuous-state MDP with declared regularity constants.
///
/// Immutable once built. The constructor validates the declared constants;
/// the samplers themselves are checked at every step().
class MdpSpec {
 public:
  using TransitionSampler =
      std::function<Point(std::span<const double>, std::size_t, Rng&)>;
  using RewardSampler =
      std::function<double(std::span<const double>, std::size_t, Rng&)>;
  using ExpectedReward = std::function<double(std::span<const double>, std::size_t)>;
  /// Deterministic rule for the next-state law at (x, a) with a resolution knob.
  using TransitionQuadrature = std::function<std::vector<WeightedPoint>(
      std::span<const double>, std::size_t, std::size_t)>;

  struct Definition {
    std::string name = "custom";
    MdpKind kind = MdpKind::Custom;
    Box bounds;
    std::vector<std::string> actions;
    double gamma = 0.5;
    double r_max = 1.0;
    double m_r = 0.0;
    double m_p = 0.0;
    TransitionSampler transition_sampler;
    RewardSampler reward_sampler;
    ExpectedReward expected_reward;            // optional
    TransitionQuadrature transition_quadrature;  // optional
    // Next-state law does not depend on (x, a).
    bool state_independent_transitions = false;
    // Present for uniform-mixing specs: the generating reward function.
    std::optional<RewardFunction> reward_function;
  };

  explicit MdpSpec(Definition def);

  const std::string& name() const { return def_.name; }
  MdpKind kind() const { return def_.kind; }
  const Box& bounds() const { return def_.bounds; }
  std::size_t dim() const { return def_.bounds.dim(); }
  const std::vector<std::string>& actions() const { return def_.actions; }
  std::size_t n_actions() const { return def_.actions.size(); }
  double gamma() const { return def_.gamma; }
  double r_max() const { return def_.r_max; }
  double m_r() const { return def_.m_r; }
  double m_p() const { return def_.m_p; }
  bool state_independent_transitions() const { return def_.state_independent_transitions; }
  const std::optional<RewardFunction>& reward_function() const { return def_.reward_function; }

  bool has_expected_reward() const { return static_cast<bool>(def_.expected_reward); }
  bool has_transition_quadrature() const { return static_cast<bool>(def_.transition_quadrature); }

  Point sample_next(std::span<const double> x, std::size_t a, Rng& rng) const {
    return def_.transition_sampler(x, a, rng);
  }
  double sample_reward(std::span<const double> x, std::size_t a, Rng& rng) const {
    return def_.reward_sampler(x, a, rng);
  }
  /// Throws std::logic_error when the MDP carries no expected reward.
  double expected_reward(std::span<const double> x, std::size_t a) const;
  /// Throws std::logic_error when the MDP carries no quadrature rule.
  std::vector<WeightedPoint> transition_nodes(std::span<const double> x, std::size_t a,
                                              std::size_t resolution) const;

 private:
  Definition def_;
};

DerivedConstants derived_constants(const MdpSpec& spec);

/// Draws (x, a, R, x') from the MDP, checking the declared bounds.
TransitionRecord step(const MdpSpec& spec, std::span<const double> state, std::size_t action,
                      Rng& rng);

/// Uniform draw from the state box.
Point sample_uniform(const Box& box, Rng& rng);

/// Next state uniform on [0,1]^d regardless of (x, a); reward Bernoulli(r(x)).
MdpSpec make_uniform_mixing(double gamma, RewardFunction reward = RewardFunction::first_coordinate(),
                            std::size_t d = 1, std::size_t n_actions = 2);

struct DriftParams {
  double step = 0.1;
  double sigma = 0.05;
};

/// 1-D drift benchmark on [0,1]: action 0 moves left, action 1 moves right,
/// Gaussian noise clamped to the interval, reward Bernoulli(1 - |x - 0.5|).
MdpSpec make_drift_1d(double gamma, DriftParams params = {});

}  // namespace nnql
