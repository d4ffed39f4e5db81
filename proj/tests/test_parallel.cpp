#include <atomic>
#include <numeric>

#include "doctest.h"
#include "segrekin/parallel.hpp"

using namespace segrekin;

TEST_CASE("chunk plan does not depend on the worker count") {
  set_num_threads(1);
  ChunkPlan a = plan_chunks(1000, 7);
  set_num_threads(8);
  ChunkPlan b = plan_chunks(1000, 7);
  CHECK(a.count == b.count);
  CHECK(a.chunk == b.chunk);
  set_num_threads(1);
}

TEST_CASE("parallel_for covers every index exactly once") {
  for (int threads : {1, 3, 8}) {
    set_num_threads(threads);
    std::vector<std::atomic<int>> hits(997);
    parallel_for(hits.size(), 10, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  set_num_threads(1);
}

TEST_CASE("parallel_sum is bitwise reproducible across thread counts") {
  std::vector<double> v(100003);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i) * 0.37);
  auto sum = [&] {
    return parallel_sum(v.size(), 64, [&](std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += v[i];
      return s;
    });
  };
  set_num_threads(1);
  double s1 = sum();
  set_num_threads(8);
  double s8 = sum();
  set_num_threads(1);
  CHECK(s1 == s8);
}

TEST_CASE("nested parallel calls run inline") {
  set_num_threads(4);
  std::atomic<int> total{0};
  parallel_for(8, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      parallel_for(10, 1, [&](std::size_t b2, std::size_t e2) { total += static_cast<int>(e2 - b2); });
  });
  CHECK(total.load() == 80);
  set_num_threads(1);
}
