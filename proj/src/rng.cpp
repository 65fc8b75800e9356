#include "forgetlab/rng.hpp"

#include <cmath>
#include <numeric>

#include "forgetlab/error.hpp"

namespace forgetlab {

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::scope(std::string_view name) const {
  std::uint64_t h = fnv1a64(name.data(), name.size());
  return Rng(hash_mix(seed_, h));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  // 53 random mantissa bits
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

double Rng::normal(double mean, double stddev) { return mean + stddev * normal(); }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw DataError("Rng::index on empty range");
  // Lemire multiply-shift; deterministic, bias < 2^-64
  return static_cast<std::size_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  shuffle(p);
  return p;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw DataError("cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " without replacement");
  // partial Fisher-Yates
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + index(n - i);
    std::swap(p[i], p[j]);
  }
  p.resize(k);
  return p;
}

Tensor Rng::normal_tensor(std::vector<std::size_t> shape, double mean, double stddev) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = normal(mean, stddev);
  return t;
}

Tensor Rng::uniform_tensor(std::vector<std::size_t> shape, double lo, double hi) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform(lo, hi);
  return t;
}

}  // namespace forgetlab
