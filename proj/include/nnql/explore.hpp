#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nnql/hnet.hpp"
#include "nnql/kernel.hpp"
#include "nnql/mdp.hpp"
#include "nnql/qtable.hpp"

namespace nnql {

/// Writes one value per action at state x.
using ValueSource = std::function<void(std::span<const double>, std::span<double>)>;

/// Stationary exploration policy: epsilon-greedy over a value source, or
/// purely random (epsilon = 1, no source).
class ExplorationPolicy {
 public:
  static ExplorationPolicy purely_random(std::size_t n_actions);
  static ExplorationPolicy epsilon_greedy(double eps, std::size_t n_actions, ValueSource values);

  std::size_t choose(std::span<const double> x, Rng& rng) const;

  /// Greedy action at x, lowest index on ties. Requires a value source.
  std::size_t greedy(std::span<const double> x) const;

  double epsilon() const { return eps_; }
  std::size_t n_actions() const { return n_actions_; }
  bool purely_random() const { return !values_; }

 private:
  ExplorationPolicy(double eps, std::size_t n_actions, ValueSource values);

  double eps_;
  std::size_t n_actions_;
  ValueSource values_;
};

/// Epsilon-greedy over the nearest-neighbor extension of a fixed table.
ExplorationPolicy epsilon_greedy_policy(double eps, std::shared_ptr<const QTable> q,
                                        const KernelSpec& kernel);

struct CoverRun {
  std::uint64_t tau = 0;
  // Step (1-based) at which each (ball, action) pair was first visited,
  // indexed ball * n_actions + action.
  std::vector<std::uint64_t> first_visit;
  // Trajectory (states and actions of steps 1..tau) when logging was requested.
  std::vector<Point> states;
  std::vector<std::size_t> actions;
};

class CoverTimeExceeded : public std::runtime_error {
 public:
  CoverTimeExceeded(std::uint64_t cap, std::size_t covered, std::size_t total);
  std::size_t covered() const { return covered_; }
  std::size_t total() const { return total_; }

 private:
  std::size_t covered_;
  std::size_t total_;
};

struct CoverOptions {
  std::optional<Point> start_state;  // uniform on the box when absent
  std::uint64_t step_cap = 10'000'000;
  bool log_trajectory = false;
};

/// Steps until every (ball, action) pair is visited. A step visits (i, a)
/// when the current state is in closed ball i and action a is taken.
CoverRun measure_cover_time(const MdpSpec& mdp, const ExplorationPolicy& policy, const HNet& net,
                            std::uint64_t seed, const CoverOptions& options = {});

/// Number of complete, back-to-back coverings of all pairs within `horizon`
/// steps; each covering starts counting afresh on the step after the
/// previous one completed.
std::uint64_t count_covers(const MdpSpec& mdp, const ExplorationPolicy& policy, const HNet& net,
                           std::uint64_t seed, std::uint64_t horizon,
                           std::optional<Point> start_state = std::nullopt);

/// Mixing declaration: P(x_{m+t} in . | x_t) >= phi nu(.), nu_min = min_i nu(B_i).
struct ErgodicityDecl {
  std::uint64_t m = 1;
  double phi = 1.0;
  double nu_min = 1.0;
};

/// m |A| / (eps phi nu_min) ln(n |A|), the covering-time bound with unit constant.
double cover_bound(const ErgodicityDecl& decl, std::size_t n, std::size_t n_actions,
                   double eps_greedy);

/// ceil(8 k L ln(1/delta)); requires k >= 4 and delta in (0, 1/e).
std::uint64_t horizon_for_k_covers(std::uint64_t k, double l_cover, double delta);

/// M H_M, the expected coupon-collector time for M equiprobable pairs.
double coupon_collector_mean(std::size_t m);

}  // namespace nnql
