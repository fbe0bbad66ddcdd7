#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nnql/hnet.hpp"

namespace nnql {

/// Real values on the discretized state-action space (centers x actions).
class QTable {
 public:
  QTable(std::shared_ptr<const HNet> net, std::vector<std::string> actions, double fill = 0.0);

  std::size_t n_centers() const { return net_->size(); }
  std::size_t n_actions() const { return actions_.size(); }
  const HNet& net() const { return *net_; }
  const std::shared_ptr<const HNet>& net_ptr() const { return net_; }
  const std::vector<std::string>& actions() const { return actions_; }

  double operator()(std::size_t center, std::size_t action) const {
    return values_[center * actions_.size() + action];
  }
  double& operator()(std::size_t center, std::size_t action) {
    return values_[center * actions_.size() + action];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double sup_norm() const;

  bool same_shape(const QTable& other) const;

 private:
  std::shared_ptr<const HNet> net_;
  std::vector<std::string> actions_;
  std::vector<double> values_;
};

/// max over (c_i, a) of |p - q|. Throws on shape mismatch.
double sup_distance(const QTable& p, const QTable& q);

}  // namespace nnql
