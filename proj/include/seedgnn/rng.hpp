#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace seedgnn {

/// Splittable random source. Every consumer of randomness (parent graph,
/// each edge subsample, the relabeling permutation, seed selection, weight
/// init, epoch shuffles, benchmark trials) receives its own child stream
/// derived from a 64-bit root seed and a stream tag, so regenerating any one
/// artifact never perturbs the others. All draws are hand-rolled on top of
/// mt19937_64 to keep byte-level reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Derive an independent child stream. Mixing follows splitmix64, which
  /// scrambles (seed, tag) into a well-distributed 64-bit child seed.
  Rng split(std::uint64_t tag) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return Rng(z);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound), bound > 0. Rejection-free modulo is fine
  /// here: bound is tiny relative to 2^64, so the bias is unmeasurable.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    return next_u64() % bound;
  }

  int below_int(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

  /// Standard normal via Box-Muller (both values used alternately).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Uniformly random permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream tags for the instance generators. Fixed numbering is part of the
/// reproducibility contract: instance k of a dataset is fully determined by
/// (root_seed, k) independent of generation order.
namespace stream {
constexpr std::uint64_t kParent = 0;
constexpr std::uint64_t kGraph1 = 1;
constexpr std::uint64_t kGraph2 = 2;
constexpr std::uint64_t kPermutation = 3;
constexpr std::uint64_t kSeeds = 4;
constexpr std::uint64_t kNodes1 = 5;
constexpr std::uint64_t kNodes2 = 6;
}  // namespace stream

}  // namespace seedgnn
