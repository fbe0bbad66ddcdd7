#include "nnql/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nnql {

LearnerState init_learner(std::shared_ptr<const HNet> net, std::vector<std::string> actions,
                          const LearnerConfig& config) {
  if (!net) throw std::invalid_argument("learner needs a net");
  if (!(config.h > 0.0)) throw std::invalid_argument("h must be positive");
  if (config.t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (!(config.gamma > 0.0 && config.gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (config.h != net->h() || config.kernel.bandwidth != net->h())
    throw std::invalid_argument("learner h, kernel bandwidth and net radius must agree");

  QTable q(net, std::move(actions), 0.0);
  const std::size_t pairs = q.values().size();
  const std::size_t n_actions = q.n_actions();
  LearnerState s{.config = config,
                 .beta = 1.0 / (1.0 - config.gamma),
                 .k = 0,
                 .q = std::move(q),
                 .gk = std::vector<double>(pairs, 0.0),
                 .counts = std::vector<std::uint64_t>(pairs, 0),
                 .alpha = 1.0,
                 .t = 0,
                 .t_k = 0,
                 .unvisited = pairs,
                 .balls = {},
                 .next_values = std::vector<double>(n_actions, 0.0),
                 .weights = {}};
  return s;
}

ObserveOutcome observe(LearnerState& s, const TransitionRecord& rec) {
  const HNet& net = s.q.net();
  const std::size_t n_actions = s.q.n_actions();
  if (rec.action >= n_actions) throw std::out_of_range("transition action outside the action set");
  if (!net.bounds().contains(rec.state) || !net.bounds().contains(rec.next_state))
    throw std::out_of_range("transition state outside the net's bounds");

  ObserveOutcome out;
  nn_extend_all(s.q, rec.next_state, s.config.kernel, s.next_values, s.weights);
  const double best = *std::max_element(s.next_values.begin(), s.next_values.end());
  out.target = rec.reward + s.config.gamma * best;

  balls_containing(net, rec.state, s.balls);
  for (std::size_t i : s.balls) {
    const std::size_t idx = i * n_actions + rec.action;
    std::uint64_t& n = s.counts[idx];
    if (n == 0) {
      s.gk[idx] = out.target;
      --s.unvisited;
    } else {
      const double eta = 1.0 / static_cast<double>(n + 1);
      s.gk[idx] = (1.0 - eta) * s.gk[idx] + eta * out.target;
    }
    ++n;
  }
  ++s.t;

  if (s.unvisited == 0) {
    auto q = s.q.values();
    double change = 0.0;
    for (std::size_t idx = 0; idx < q.size(); ++idx) {
      const double next = (1.0 - s.alpha) * q[idx] + s.alpha * s.gk[idx];
      change = std::max(change, std::abs(next - q[idx]));
      q[idx] = next;
    }
    ++s.k;
    s.alpha = s.beta / (s.beta + static_cast<double>(s.k));
    std::fill(s.counts.begin(), s.counts.end(), 0);
    s.unvisited = s.counts.size();
    s.t_k = s.t;
    out.iteration_completed = true;
    out.sup_change = change;
  }
  return out;
}

double q_estimate(const LearnerState& state, std::span<const double> x, std::size_t action) {
  return nn_extend(state.q, x, action, state.config.kernel);
}

NnqlRun run_nnql(const MdpSpec& mdp, const ExplorationPolicy& policy,
                 std::shared_ptr<const HNet> net, const LearnerConfig& config, std::uint64_t seed,
                 const IterationHook& on_iteration) {
  if (config.gamma != mdp.gamma()) throw std::invalid_argument("learner gamma differs from the MDP's");
  if (policy.n_actions() != mdp.n_actions())
    throw std::invalid_argument("policy and MDP disagree on the number of actions");
  LearnerState s = init_learner(std::move(net), mdp.actions(), config);
  Rng rng(seed);
  Point state = sample_uniform(mdp.bounds(), rng);

  RunStats stats;
  stats.iteration_starts.push_back(0);
  while (s.t < config.t_max) {
    const std::size_t a = policy.choose(state, rng);
    TransitionRecord rec = step(mdp, state, a, rng);
    const ObserveOutcome out = observe(s, rec);
    state = std::move(rec.next_state);
    if (out.iteration_completed) {
      stats.iteration_starts.push_back(s.t);
      stats.sup_changes.push_back(out.sup_change);
      const double norm = s.q.sup_norm();
      stats.max_sup_norm = std::max(stats.max_sup_norm, norm);
      if (norm > config.v_max + kStabilitySlack) ++stats.stability_violations;
      if (on_iteration && !on_iteration(s)) {
        stats.stopped_early = true;
        break;
      }
    }
  }
  stats.final_k = s.k;
  stats.steps = s.t;
  return NnqlRun{std::move(s.q), std::move(stats)};
}

NnqlRun run_nnql(const MdpSpec& mdp, const ExplorationPolicy& policy, const LearnerConfig& config,
                 std::uint64_t seed, const IterationHook& on_iteration) {
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), config.h));
  return run_nnql(mdp, policy, std::move(net), config, seed, on_iteration);
}

}  // namespace nnql
