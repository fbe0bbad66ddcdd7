#include "nnql/explore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nnql {

ExplorationPolicy::ExplorationPolicy(double eps, std::size_t n_actions, ValueSource values)
    : eps_(eps), n_actions_(n_actions), values_(std::move(values)) {
  if (n_actions_ == 0) throw std::invalid_argument("policy needs at least one action");
  if (!(eps_ > 0.0 && eps_ <= 1.0)) throw std::invalid_argument("epsilon must lie in (0,1]");
}

ExplorationPolicy ExplorationPolicy::purely_random(std::size_t n_actions) {
  return ExplorationPolicy(1.0, n_actions, {});
}

ExplorationPolicy ExplorationPolicy::epsilon_greedy(double eps, std::size_t n_actions,
                                                    ValueSource values) {
  if (!values) throw std::invalid_argument("epsilon-greedy needs a value source");
  return ExplorationPolicy(eps, n_actions, std::move(values));
}

std::size_t ExplorationPolicy::greedy(std::span<const double> x) const {
  if (!values_) throw std::logic_error("purely random policy has no greedy action");
  std::vector<double> v(n_actions_);
  values_(x, v);
  std::size_t best = 0;
  for (std::size_t a = 1; a < v.size(); ++a) {
    if (v[a] > v[best]) best = a;
  }
  return best;
}

std::size_t ExplorationPolicy::choose(std::span<const double> x, Rng& rng) const {
  std::uniform_int_distribution<std::size_t> uniform(0, n_actions_ - 1);
  if (!values_) return uniform(rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < eps_) return uniform(rng);
  return greedy(x);
}

ExplorationPolicy epsilon_greedy_policy(double eps, std::shared_ptr<const QTable> q,
                                        const KernelSpec& kernel) {
  if (!q) throw std::invalid_argument("epsilon_greedy_policy needs a table");
  const std::size_t n = q->n_actions();
  return ExplorationPolicy::epsilon_greedy(
      eps, n, [q = std::move(q), kernel](std::span<const double> x, std::span<double> out) {
        Weights scratch;
        nn_extend_all(*q, x, kernel, out, scratch);
      });
}

CoverTimeExceeded::CoverTimeExceeded(std::uint64_t cap, std::size_t covered, std::size_t total)
    : std::runtime_error("covering not reached within " + std::to_string(cap) + " steps (" +
                         std::to_string(covered) + " of " + std::to_string(total) +
                         " pairs visited)"),
      covered_(covered),
      total_(total) {}

CoverRun measure_cover_time(const MdpSpec& mdp, const ExplorationPolicy& policy, const HNet& net,
                            std::uint64_t seed, const CoverOptions& options) {
  if (policy.n_actions() != mdp.n_actions())
    throw std::invalid_argument("policy and MDP disagree on the number of actions");
  Rng rng(seed);
  Point state = options.start_state ? *options.start_state : sample_uniform(mdp.bounds(), rng);
  const std::size_t n_actions = mdp.n_actions();
  const std::size_t total = net.size() * n_actions;

  CoverRun run;
  run.first_visit.assign(total, 0);
  std::size_t covered = 0;
  std::vector<std::size_t> balls;
  for (std::uint64_t t = 1; t <= options.step_cap; ++t) {
    const std::size_t a = policy.choose(state, rng);
    balls_containing(net, state, balls);
    for (std::size_t i : balls) {
      auto& slot = run.first_visit[i * n_actions + a];
      if (slot == 0) {
        slot = t;
        ++covered;
      }
    }
    if (options.log_trajectory) {
      run.states.push_back(state);
      run.actions.push_back(a);
    }
    if (covered == total) {
      run.tau = t;
      return run;
    }
    state = step(mdp, state, a, rng).next_state;
  }
  throw CoverTimeExceeded(options.step_cap, covered, total);
}

std::uint64_t count_covers(const MdpSpec& mdp, const ExplorationPolicy& policy, const HNet& net,
                           std::uint64_t seed, std::uint64_t horizon,
                           std::optional<Point> start_state) {
  Rng rng(seed);
  Point state = start_state ? *start_state : sample_uniform(mdp.bounds(), rng);
  const std::size_t n_actions = mdp.n_actions();
  const std::size_t total = net.size() * n_actions;
  std::vector<char> seen(total, 0);
  std::size_t covered = 0;
  std::uint64_t covers = 0;
  std::vector<std::size_t> balls;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t a = policy.choose(state, rng);
    balls_containing(net, state, balls);
    for (std::size_t i : balls) {
      char& s = seen[i * n_actions + a];
      if (!s) {
        s = 1;
        ++covered;
      }
    }
    if (covered == total) {
      ++covers;
      covered = 0;
      std::fill(seen.begin(), seen.end(), 0);
    }
    state = step(mdp, state, a, rng).next_state;
  }
  return covers;
}

double cover_bound(const ErgodicityDecl& decl, std::size_t n, std::size_t n_actions,
                   double eps_greedy) {
  if (decl.m == 0 || !(decl.phi > 0.0 && decl.phi <= 1.0) || !(decl.nu_min > 0.0))
    throw std::invalid_argument("ergodicity declaration must be positive with phi <= 1");
  if (!(eps_greedy > 0.0 && eps_greedy <= 1.0))
    throw std::invalid_argument("epsilon must lie in (0,1]");
  if (n == 0 || n_actions == 0) throw std::invalid_argument("empty ball-action space");
  const double pairs = static_cast<double>(n) * static_cast<double>(n_actions);
  return static_cast<double>(decl.m) * static_cast<double>(n_actions) /
         (eps_greedy * decl.phi * decl.nu_min) * std::log(pairs);
}

std::uint64_t horizon_for_k_covers(std::uint64_t k, double l_cover, double delta) {
  if (k < 4) throw std::domain_error("horizon formula needs k >= 4");
  if (!(delta > 0.0 && delta < std::exp(-1.0))) throw std::domain_error("delta must lie in (0, 1/e)");
  if (!(l_cover > 0.0)) throw std::domain_error("covering time must be positive");
  return static_cast<std::uint64_t>(
      std::ceil(8.0 * static_cast<double>(k) * l_cover * std::log(1.0 / delta)));
}

double coupon_collector_mean(std::size_t m) {
  double h = 0.0;
  for (std::size_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
  return static_cast<double>(m) * h;
}

}  // namespace nnql
