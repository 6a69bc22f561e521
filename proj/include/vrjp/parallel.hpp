#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "vrjp/random.hpp"

namespace vrjp {

// Runs fn(r, rng_r) for r < n, where rng_r is seeded from (seed, r), so the
// result does not depend on the thread count.
template <class F>
auto parallel_replicates(std::size_t n, std::uint64_t seed, std::size_t threads, F&& fn) {
  using T = decltype(fn(std::size_t{0}, std::declval<Rng&>()));
  std::vector<T> out(n);
  auto run = [&](std::size_t r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    out[r] = fn(r, rng);
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t r = 0; r < n; ++r) run(r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t r; (r = next.fetch_add(1)) < n;) {
        try {
          run(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace vrjp
