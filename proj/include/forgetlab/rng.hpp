#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "forgetlab/tensor.hpp"

namespace forgetlab {

/// Deterministic random stream. Same seed, same platform or not: the draw
/// sequence is identical, because all distributions are derived by hand from
/// the raw mt19937_64 output (std:: distributions are implementation-defined).
///
/// Sub-streams for named scopes are derived from (seed, scope name) only,
/// never from the parent's draw position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Child stream for a named scope; independent of draws made so far.
  Rng scope(std::string_view name) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; pairs cached.
  double normal();
  double normal(double mean, double stddev);
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n);
  /// k distinct indices from [0, n), in random order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  Tensor normal_tensor(std::vector<std::size_t> shape, double mean = 0.0, double stddev = 1.0);
  Tensor uniform_tensor(std::vector<std::size_t> shape, double lo = 0.0, double hi = 1.0);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace forgetlab
