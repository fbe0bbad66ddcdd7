#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nnql/mdp.hpp"

namespace nnql {

/// Finite set of centers c_1..c_n covering a box at radius h.
///
/// Ball i is the closed ball {x : |x - c_i| <= h}. Centers are stored
/// row-major in one buffer; center(i) returns a view.
class HNet {
 public:
  /// Wraps explicit centers. Rejects centers outside the box or duplicated.
  HNet(Box bounds, double h, std::vector<Point> centers);

  double h() const { return h_; }
  std::size_t dim() const { return bounds_.dim(); }
  std::size_t size() const { return n_; }
  const Box& bounds() const { return bounds_; }

  std::span<const double> center(std::size_t i) const {
    return {coords_.data() + i * dim(), dim()};
  }
  std::vector<Point> centers() const;

 private:
  Box bounds_;
  double h_;
  std::size_t n_;
  std::vector<double> coords_;
};

struct BallSet {
  std::vector<std::size_t> indices;
};

inline constexpr std::uint64_t kDefaultCenterCap = 10'000'000;

/// Per-axis grid spacing that keeps every point within h of a center.
double grid_spacing(std::size_t d, double h);

/// Number of centers build_grid_hnet would produce, without building them.
std::uint64_t covering_number_estimate(const Box& bounds, double h);

/// Uniform axis grid whose worst-case distance to the nearest center is < h.
HNet build_grid_hnet(const Box& bounds, double h, std::uint64_t center_cap = kDefaultCenterCap);

/// Centers at the midpoints of `cells` equal cells per axis, with h equal to
/// the cell half-diagonal so each ball circumscribes its cell.
HNet build_partition_hnet(const Box& bounds, std::size_t cells);

/// Indices of all balls containing x, ascending. Throws std::logic_error
/// when x is in no ball, which means the net does not cover the box.
BallSet balls_containing(const HNet& net, std::span<const double> x);

/// Same as above, writing into a caller-owned buffer.
void balls_containing(const HNet& net, std::span<const double> x, std::vector<std::size_t>& out);

/// Largest distance from any probe to its nearest center.
double covering_radius(const HNet& net, std::span<const Point> probes);

}  // namespace nnql
