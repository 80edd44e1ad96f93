#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace emoclap {

// Deterministic RNG wrapper. mt19937_64 output is pinned by the standard;
// the distributions below are hand-rolled so streams are identical across
// compilers (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // unbiased integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = engine_();
      r = x % n;
    } while (x - r > UINT64_MAX - n + 1);
    return r;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Stable per-item seed derivation (splitmix64 over seed ^ index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

std::uint64_t fnv1a64(std::string_view s);

std::string to_lower(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file_hex(const std::string& path);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index writes its
// own output slot, so results do not depend on the thread count.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace emoclap
