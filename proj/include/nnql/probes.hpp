#pragma once

#include <cstddef>
#include <vector>

#include "nnql/mdp.hpp"

namespace nnql {

/// First n points of the Halton sequence (bases 2, 3, 5, ...) scaled to the box.
std::vector<Point> halton_probes(const Box& box, std::size_t n);

std::vector<Point> uniform_probes(const Box& box, std::size_t n, Rng& rng);

}  // namespace nnql
