#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace degroot {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the named sub-stream `name` under `seed`. Stream names are
/// hashed with 64-bit FNV-1a and mixed through SplitMix64, so streams are
/// stable across platforms and independent of the order they are created.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; every transform on top of it is
/// implemented here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
///
///  - uniform():  top 53 bits of one engine draw, scaled to [0, 1).
///  - index(n):   rejection sampling on the top bits, unbiased in [0, n).
///  - normal():   Box-Muller; both variates of a pair are used in turn.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  std::uint64_t index(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(values[i - 1], values[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace degroot
