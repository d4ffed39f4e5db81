#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace segrekin {

void set_num_threads(int n);
int num_threads();

// Work in [0, n) is cut into chunks whose boundaries depend only on n and
// grain, never on the thread count, so reductions built from per-chunk
// partials are bitwise reproducible.
struct ChunkPlan {
  std::size_t n = 0;
  std::size_t chunk = 1;
  std::size_t count = 0;
  std::size_t begin(std::size_t c) const { return c * chunk; }
  std::size_t end(std::size_t c) const { return (c + 1) * chunk < n ? (c + 1) * chunk : n; }
};

ChunkPlan plan_chunks(std::size_t n, std::size_t grain);

void parallel_chunks(const ChunkPlan& plan,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

// Ordered-sum reduction: partial per chunk, combined left to right.
double parallel_sum(std::size_t n, std::size_t grain,
                    const std::function<double(std::size_t begin, std::size_t end)>& partial);

}  // namespace segrekin
