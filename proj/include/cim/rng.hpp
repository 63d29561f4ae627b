#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace cim::rng {

// SplitMix64 mixing step. Used for seed derivation and set hashing so that
// every (master seed, stream id) pair maps to a well-separated engine seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic combination of a master seed and a stream index.
inline std::uint64_t mix(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= stream + 0x9e3779b97f4a7c15ull;
  return a ^ splitmix64(s);
}

// Canonical order-independent hash of a node set (ids are sorted first).
inline std::uint64_t hash_node_set(std::span<const std::int32_t> nodes) {
  std::vector<std::int32_t> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = 0x6a09e667f3bcc909ull;
  for (std::int32_t v : sorted) {
    std::uint64_t s = h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    h = splitmix64(s);
  }
  return h;
}

// SplitMix64 generator. Construction is free, which matters when every
// Monte-Carlo simulation gets its own stream, and the output sequence is
// pinned by this header rather than a library implementation.
class Engine {
 public:
  using result_type = std::uint64_t;
  explicit Engine(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return splitmix64(state_); }

 private:
  std::uint64_t state_;
};

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1). std:: distributions are implementation-defined,
// so draws are derived from raw engine output to pin results.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n).
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = eng();
    if (r >= threshold) return r % n;
  }
}

// Fisher-Yates shuffle with pinned draw sequence.
template <typename T>
void shuffle(std::vector<T>& values, Engine& eng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(eng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace cim::rng
