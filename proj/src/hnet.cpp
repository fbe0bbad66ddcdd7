#include "nnql/hnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nnql {

HNet::HNet(Box bounds, double h, std::vector<Point> centers)
    : bounds_(std::move(bounds)), h_(h), n_(centers.size()) {
  if (!(h > 0.0)) throw std::invalid_argument("net radius h must be positive");
  if (centers.empty()) throw std::invalid_argument("net needs at least one center");
  const std::size_t d = bounds_.dim();
  coords_.reserve(n_ * d);
  for (const auto& c : centers) {
    if (!bounds_.contains(c)) throw std::invalid_argument("net center outside bounds");
    coords_.insert(coords_.end(), c.begin(), c.end());
  }
  std::vector<Point> sorted = std::move(centers);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("net centers must be distinct");
}

std::vector<Point> HNet::centers() const {
  std::vector<Point> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto c = center(i);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

double grid_spacing(std::size_t d, double h) {
  if (d <= 1) return h;
  return h * (2.0 / std::sqrt(static_cast<double>(d))) * 0.99;
}

namespace {

std::uint64_t axis_count(double side, double spacing) {
  const double cells = side / spacing;
  // Absorb representation error so that 1/0.1 gives 10 cells, not 11.
  const double rounded = std::ceil(cells - 1e-9 * std::max(1.0, cells));
  return static_cast<std::uint64_t>(std::max(rounded, 1.0)) + 1;
}

}  // namespace

std::uint64_t covering_number_estimate(const Box& bounds, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("net radius h must be positive");
  const double s = grid_spacing(bounds.dim(), h);
  double total = 1.0;
  std::uint64_t exact = 1;
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    const auto n = axis_count(bounds.side(i), s);
    total *= static_cast<double>(n);
    if (total > static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2))
      return std::numeric_limits<std::uint64_t>::max();
    exact *= n;
  }
  return exact;
}

HNet build_grid_hnet(const Box& bounds, double h, std::uint64_t center_cap) {
  if (!(h > 0.0)) throw std::invalid_argument("net radius h must be positive");
  const std::uint64_t n = covering_number_estimate(bounds, h);
  if (n > center_cap)
    throw std::length_error("h = " + std::to_string(h) + " needs " + std::to_string(n) +
                            " centers, above the cap of " + std::to_string(center_cap));
  const std::size_t d = bounds.dim();
  const double s = grid_spacing(d, h);
  std::vector<std::uint64_t> counts(d);
  std::vector<double> steps(d);
  for (std::size_t i = 0; i < d; ++i) {
    counts[i] = axis_count(bounds.side(i), s);
    steps[i] = bounds.side(i) / static_cast<double>(counts[i] - 1);
  }
  std::vector<Point> centers;
  centers.reserve(n);
  std::vector<std::uint64_t> idx(d, 0);
  for (std::uint64_t k = 0; k < n; ++k) {
    Point c(d);
    for (std::size_t i = 0; i < d; ++i) {
      c[i] = idx[i] + 1 == counts[i] ? bounds.hi[i]
                                     : bounds.lo[i] + static_cast<double>(idx[i]) * steps[i];
    }
    centers.push_back(std::move(c));
    // Last axis varies fastest.
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return HNet(bounds, h, std::move(centers));
}

HNet build_partition_hnet(const Box& bounds, std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("partition needs at least one cell per axis");
  const std::size_t d = bounds.dim();
  double half_diag2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double half = 0.5 * bounds.side(i) / static_cast<double>(cells);
    half_diag2 += half * half;
  }
  std::size_t n = 1;
  for (std::size_t i = 0; i < d; ++i) n *= cells;
  std::vector<Point> centers;
  centers.reserve(n);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < n; ++k) {
    Point c(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double w = bounds.side(i) / static_cast<double>(cells);
      c[i] = bounds.lo[i] + (static_cast<double>(idx[i]) + 0.5) * w;
    }
    centers.push_back(std::move(c));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < cells) break;
      idx[i] = 0;
    }
  }
  return HNet(bounds, std::sqrt(half_diag2), std::move(centers));
}

void balls_containing(const HNet& net, std::span<const double> x, std::vector<std::size_t>& out) {
  out.clear();
  const double h = net.h();
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (distance(x, net.center(i)) <= h) out.push_back(i);
  }
  if (out.empty()) throw std::logic_error("point lies in no ball: net does not cover the state space");
}

BallSet balls_containing(const HNet& net, std::span<const double> x) {
  BallSet set;
  balls_containing(net, x, set.indices);
  return set;
}

double covering_radius(const HNet& net, std::span<const Point> probes) {
  double worst = 0.0;
  for (const auto& x : probes) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < net.size(); ++i) best = std::min(best, distance(x, net.center(i)));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace nnql
