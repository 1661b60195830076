#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace aniso {

// Worker cap: ANISO_MAXIMAL_THREADS if set, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("ANISO_MAXIMAL_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return k;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static partition of [0, n) into contiguous ranges, one per worker.
// Workers write disjoint outputs only, so results never depend on the
// worker count or on scheduling.
inline void parallel_for_ranges(std::size_t n,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 0; w + 1 < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(n * (workers - 1) / workers, n);
  for (auto& t : pool) t.join();
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  parallel_for_ranges(n, [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

// SplitMix64: deterministic sub-seed derivation for (seed, worker) streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Small deterministic RNG (xoshiro-free, stdlib-distribution-free so that
// streams are identical across platforms and library versions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // burn-in to decorrelate small seeds
    for (int i = 0; i < 4; ++i) splitmix64(state_);
  }
  static Rng sub_stream(std::uint64_t seed, std::uint64_t worker) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (worker + 1);
    return Rng(s);
  }
  std::uint64_t next_u64() { return splitmix64(state_); }
  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace aniso
