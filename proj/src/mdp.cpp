#include "nnql/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nnql {

Box Box::unit(std::size_t d) {
  return Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

Point Box::clamp(std::span<const double> x) const {
  Point out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
  return out;
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

RewardFunction RewardFunction::first_coordinate() {
  return RewardFunction{[](std::span<const double> x) { return x[0]; }, 1.0, "linear"};
}

RewardFunction RewardFunction::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("constant reward must lie in [0,1]");
  return RewardFunction{[value](std::span<const double>) { return value; }, 0.0, "constant"};
}

MdpSpec::MdpSpec(Definition def) : def_(std::move(def)) {
  if (!(def_.gamma > 0.0 && def_.gamma < 1.0))
    throw std::invalid_argument("gamma must lie strictly inside (0,1)");
  if (def_.bounds.dim() == 0 || def_.bounds.lo.size() != def_.bounds.hi.size())
    throw std::invalid_argument("state bounds must be a non-empty box");
  for (std::size_t i = 0; i < def_.bounds.dim(); ++i) {
    if (!(def_.bounds.lo[i] < def_.bounds.hi[i]))
      throw std::invalid_argument("state bounds must be non-degenerate");
  }
  if (def_.actions.empty()) throw std::invalid_argument("action set must be non-empty");
  if (def_.r_max < 0.0 || def_.m_r < 0.0 || def_.m_p < 0.0)
    throw std::invalid_argument("r_max, m_r and m_p must be nonnegative");
  if (!def_.transition_sampler || !def_.reward_sampler)
    throw std::invalid_argument("transition and reward samplers are required");
}

double MdpSpec::expected_reward(std::span<const double> x, std::size_t a) const {
  if (!def_.expected_reward) throw std::logic_error("MDP '" + def_.name + "' has no expected reward");
  return def_.expected_reward(x, a);
}

std::vector<WeightedPoint> MdpSpec::transition_nodes(std::span<const double> x, std::size_t a,
                                                     std::size_t resolution) const {
  if (!def_.transition_quadrature)
    throw std::logic_error("MDP '" + def_.name + "' has no transition quadrature");
  return def_.transition_quadrature(x, a, resolution);
}

DerivedConstants derived_constants(const MdpSpec& spec) {
  DerivedConstants c;
  c.beta = 1.0 / (1.0 - spec.gamma());
  c.v_max = c.beta * spec.r_max();
  c.lip_c = spec.m_r() + spec.gamma() * c.v_max * spec.m_p();
  return c;
}

TransitionRecord step(const MdpSpec& spec, std::span<const double> state, std::size_t action,
                      Rng& rng) {
  if (!spec.bounds().contains(state)) throw std::out_of_range("state outside MDP bounds");
  if (action >= spec.n_actions()) throw std::out_of_range("unknown action index");
  TransitionRecord rec;
  rec.state.assign(state.begin(), state.end());
  rec.action = action;
  rec.reward = spec.sample_reward(state, action, rng);
  rec.next_state = spec.sample_next(state, action, rng);
  if (!(rec.reward >= 0.0 && rec.reward <= spec.r_max())) {
    std::ostringstream msg;
    msg << "sampled reward " << rec.reward << " outside [0, " << spec.r_max() << "]";
    throw std::logic_error(msg.str());
  }
  if (!spec.bounds().contains(rec.next_state))
    throw std::logic_error("sampled next state outside MDP bounds");
  return rec;
}

Point sample_uniform(const Box& box, Rng& rng) {
  Point x(box.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
    x[i] = u(rng);
  }
  return x;
}

namespace {

std::vector<std::string> default_actions(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("a" + std::to_string(i));
  return out;
}

// Tensor midpoint rule with `per_axis` nodes on each axis of the box.
std::vector<WeightedPoint> midpoint_nodes(const Box& box, std::size_t per_axis) {
  const std::size_t d = box.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= per_axis;
  const double w = 1.0 / static_cast<double>(total);
  std::vector<WeightedPoint> nodes;
  nodes.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double h = box.side(i) / static_cast<double>(per_axis);
      x[i] = box.lo[i] + (static_cast<double>(idx[i]) + 0.5) * h;
    }
    nodes.push_back({std::move(x), w});
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
  }
  return nodes;
}

}  // namespace

MdpSpec make_uniform_mixing(double gamma, RewardFunction reward, std::size_t d,
                            std::size_t n_actions) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie strictly inside (0,1)");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  MdpSpec::Definition def;
  def.name = "uniform-mixing";
  def.kind = MdpKind::UniformMixing;
  def.bounds = Box::unit(d);
  def.actions = default_actions(n_actions);
  def.gamma = gamma;
  def.r_max = 1.0;
  def.m_r = reward.lipschitz;
  def.m_p = 0.0;
  Box box = def.bounds;
  def.transition_sampler = [box](std::span<const double>, std::size_t, Rng& rng) {
    return sample_uniform(box, rng);
  };
  auto r = reward.eval;
  def.reward_sampler = [r](std::span<const double> x, std::size_t, Rng& rng) {
    std::bernoulli_distribution coin(std::clamp(r(x), 0.0, 1.0));
    return coin(rng) ? 1.0 : 0.0;
  };
  def.expected_reward = [r](std::span<const double> x, std::size_t) { return r(x); };
  def.transition_quadrature = [box](std::span<const double>, std::size_t, std::size_t n) {
    return midpoint_nodes(box, n);
  };
  def.state_independent_transitions = true;
  def.reward_function = std::move(reward);
  return MdpSpec(std::move(def));
}

MdpSpec make_drift_1d(double gamma, DriftParams params) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("drift noise sigma must be positive");
  MdpSpec::Definition def;
  def.name = "drift-1d";
  def.kind = MdpKind::Drift1d;
  def.bounds = Box::unit(1);
  def.actions = {"left", "right"};
  def.gamma = gamma;
  def.r_max = 1.0;
  def.m_r = 1.0;
  // Clamping is a pushforward, so the total-variation Lipschitz constant of
  // the Gaussian location family, 2 * phi(0) / sigma, still bounds it.
  def.m_p = std::sqrt(2.0 / std::numbers::pi) / params.sigma;
  auto shift = [params](std::size_t a) { return a == 0 ? -params.step : params.step; };
  def.transition_sampler = [params, shift](std::span<const double> x, std::size_t a, Rng& rng) {
    std::normal_distribution<double> noise(0.0, params.sigma);
    return Point{std::clamp(x[0] + shift(a) + noise(rng), 0.0, 1.0)};
  };
  auto mean_reward = [](std::span<const double> x) { return 1.0 - std::abs(x[0] - 0.5); };
  def.reward_sampler = [mean_reward](std::span<const double> x, std::size_t, Rng& rng) {
    std::bernoulli_distribution coin(mean_reward(x));
    return coin(rng) ? 1.0 : 0.0;
  };
  def.expected_reward = [mean_reward](std::span<const double> x, std::size_t) {
    return mean_reward(x);
  };
  // Equally spaced standard-normal nodes on [-6, 6] with density weights.
  def.transition_quadrature = [params, shift](std::span<const double> x, std::size_t a,
                                              std::size_t n) {
    if (n < 3) n = 3;
    std::vector<WeightedPoint> nodes;
    nodes.reserve(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = -6.0 + 12.0 * static_cast<double>(j) / static_cast<double>(n - 1);
      const double w = std::exp(-0.5 * z * z);
      nodes.push_back({Point{std::clamp(x[0] + shift(a) + params.sigma * z, 0.0, 1.0)}, w});
      total += w;
    }
    for (auto& node : nodes) node.w /= total;
    return nodes;
  };
  return MdpSpec(std::move(def));
}

}  // namespace nnql
