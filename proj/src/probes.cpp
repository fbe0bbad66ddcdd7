#include "nnql/probes.hpp"

#include <array>
#include <stdexcept>

namespace nnql {

namespace {

constexpr std::array<unsigned, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::size_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<Point> halton_probes(const Box& box, std::size_t n) {
  if (box.dim() > kPrimes.size()) throw std::invalid_argument("Halton probes support d <= 12");
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Point x(box.dim());
    for (std::size_t k = 0; k < box.dim(); ++k)
      x[k] = box.lo[k] + box.side(k) * radical_inverse(i, kPrimes[k]);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Point> uniform_probes(const Box& box, std::size_t n, Rng& rng) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_uniform(box, rng));
  return out;
}

}  // namespace nnql
