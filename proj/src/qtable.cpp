#include "nnql/qtable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nnql {

QTable::QTable(std::shared_ptr<const HNet> net, std::vector<std::string> actions, double fill)
    : net_(std::move(net)), actions_(std::move(actions)) {
  if (!net_) throw std::invalid_argument("QTable needs a net");
  if (actions_.empty()) throw std::invalid_argument("QTable needs at least one action");
  values_.assign(net_->size() * actions_.size(), fill);
}

double QTable::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool QTable::same_shape(const QTable& other) const {
  return n_centers() == other.n_centers() && n_actions() == other.n_actions();
}

double sup_distance(const QTable& p, const QTable& q) {
  if (!p.same_shape(q)) throw std::invalid_argument("QTable shape mismatch");
  double m = 0.0;
  auto a = p.values();
  auto b = q.values();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace nnql
