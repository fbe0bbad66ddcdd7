#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nnql/explore.hpp"
#include "nnql/hnet.hpp"
#include "nnql/kernel.hpp"
#include "nnql/mdp.hpp"
#include "nnql/qtable.hpp"

namespace nnql {

struct LearnerConfig {
  double h = 0.1;
  KernelSpec kernel;
  double gamma = 0.5;
  std::uint64_t t_max = 1;
  double v_max = 2.0;
};

/// Bookkeeping of the online nearest-neighbor Q-learner.
///
/// Within iteration k, every observation updates the running average gk of
/// each ball containing the current state. Once every (ball, action) pair has
/// been visited, q is blended toward gk with step alpha_k = beta / (beta + k)
/// and the visit counts are reset. gk itself is never reset: the first visit
/// of a new iteration overwrites the stale entry.
struct LearnerState {
  LearnerConfig config;
  double beta = 2.0;
  std::uint64_t k = 0;
  QTable q;
  std::vector<double> gk;
  std::vector<std::uint64_t> counts;
  double alpha = 1.0;
  std::uint64_t t = 0;
  std::uint64_t t_k = 0;
  std::size_t unvisited = 0;  // pairs with counts == 0

  // Scratch reused across observations.
  std::vector<std::size_t> balls;
  std::vector<double> next_values;
  Weights weights;
};

struct ObserveOutcome {
  double target = 0.0;
  bool iteration_completed = false;
  double sup_change = 0.0;  // |q^{k+1} - q^k|_inf when an iteration completed
};

LearnerState init_learner(std::shared_ptr<const HNet> net, std::vector<std::string> actions,
                          const LearnerConfig& config);

/// Folds one transition into the learner; blends q when the iteration completes.
ObserveOutcome observe(LearnerState& state, const TransitionRecord& rec);

/// (Gamma_NN q^k)(x, a).
double q_estimate(const LearnerState& state, std::span<const double> x, std::size_t action);

struct RunStats {
  std::vector<std::uint64_t> iteration_starts;  // T_0 = 0, T_1, ...
  std::vector<double> sup_changes;              // per completed iteration
  std::uint64_t final_k = 0;
  std::uint64_t steps = 0;
  double max_sup_norm = 0.0;
  std::uint64_t stability_violations = 0;  // iterations with |q^k|_inf > V_max
  bool stopped_early = false;
};

struct NnqlRun {
  QTable q;
  RunStats stats;
};

/// Called after every completed iteration; returning false stops the run.
using IterationHook = std::function<bool(const LearnerState&)>;

/// Drives the MDP with `policy` for config.t_max steps from a uniform start.
NnqlRun run_nnql(const MdpSpec& mdp, const ExplorationPolicy& policy,
                 std::shared_ptr<const HNet> net, const LearnerConfig& config, std::uint64_t seed,
                 const IterationHook& on_iteration = {});

/// As above on the grid net of radius config.h.
NnqlRun run_nnql(const MdpSpec& mdp, const ExplorationPolicy& policy, const LearnerConfig& config,
                 std::uint64_t seed, const IterationHook& on_iteration = {});

inline constexpr double kStabilitySlack = 1e-12;

}  // namespace nnql
