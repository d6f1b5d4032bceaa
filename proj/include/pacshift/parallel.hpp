#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace pacshift {

struct Execution {
  unsigned workers = 1;
};

/// Runs body(i, acc) for i in [0, count) over contiguous per-worker ranges
/// and folds the per-worker accumulators with +=. Accumulators hold integer
/// counts, so the result does not depend on the worker count.
template <class Acc, class Body>
Acc parallel_accumulate(std::uint64_t count, Execution exec, Body body) {
  const std::uint64_t workers = std::clamp<std::uint64_t>(exec.workers, 1, std::max<std::uint64_t>(count, 1));
  if (workers == 1) {
    Acc acc{};
    for (std::uint64_t i = 0; i < count; ++i) body(i, acc);
    return acc;
  }
  std::vector<Acc> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t first = count * w / workers;
      const std::uint64_t last = count * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] {
        try {
          for (std::uint64_t i = first; i < last; ++i) body(i, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Acc total{};
  for (auto& p : partial) total += p;
  return total;
}

/// results[i] = fn(i) for i in [0, count), computed over contiguous
/// per-worker ranges.
template <class R, class Fn>
std::vector<R> parallel_map(std::uint64_t count, Execution exec, Fn fn) {
  std::vector<R> results(count);
  struct Nothing {
    Nothing& operator+=(const Nothing&) { return *this; }
  };
  parallel_accumulate<Nothing>(count, exec, [&](std::uint64_t i, Nothing&) { results[i] = fn(i); });
  return results;
}

// Common accumulator: integer count, sum and sum of squares.
struct Tally {
  std::uint64_t count = 0;
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;

  void add(std::uint64_t v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  Tally& operator+=(const Tally& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
};

}  // namespace pacshift
