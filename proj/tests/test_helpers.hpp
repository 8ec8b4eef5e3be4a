#pragma once

#include <cstdint>

#include "psyn/cube.hpp"
#include "psyn/rng.hpp"

namespace psyn::test {

inline Dataset random_dataset(std::size_t p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset x(p);
  x.reserve(n);
  std::vector<Sign> row(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& s : row) s = static_cast<Sign>(rng.sign());
    x.push_back(row);
  }
  return x;
}

/// Rows whose coordinates are +1 with probability `bias`, independently.
inline Dataset biased_dataset(std::size_t p, std::size_t n, double bias, std::uint64_t seed) {
  Rng rng(seed);
  Dataset x(p);
  std::vector<Sign> row(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& s : row) s = rng.uniform() < bias ? Sign{1} : Sign{-1};
    x.push_back(row);
  }
  return x;
}

/// All 2^p points of the cube, coordinate j is bit j of the counter.
inline Dataset full_cube(std::size_t p) {
  Dataset x(p);
  std::vector<Sign> row(p);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << p); ++v) {
    for (std::size_t j = 0; j < p; ++j) row[j] = ((v >> j) & 1U) ? Sign{1} : Sign{-1};
    x.push_back(row);
  }
  return x;
}

}  // namespace psyn::test
