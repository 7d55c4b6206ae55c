#ifndef SPMRP_RNG_HPP
#define SPMRP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace spmrp {

// Counter-based pseudo-random stream. A stream is addressed by
// (seed, label, counter); any draw is reproducible independently of how
// work is partitioned across threads, so outputs do not depend on the
// worker count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label, std::uint64_t counter = 0)
      : state_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull, hash_label(label)), counter)) {}

  static RngStream child(std::uint64_t seed, std::string_view label, std::uint64_t counter) {
    return RngStream(seed, label, counter);
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1), never returning an exact endpoint.
  double uniform() {
    const double u = (next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; two uniforms per variate keeps the stream layout fixed.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  // Inversion; adequate for the cell sizes used here.
  long binomial(long n, double p) {
    long y = 0;
    for (long t = 0; t < n; ++t)
      if (uniform() < p) ++y;
    return y;
  }

  // Index in [0, n) from cumulative weights (ascending, last ~1).
  int pick(const double* cumulative, int n) {
    const double u = uniform();
    for (int i = 0; i < n; ++i)
      if (u <= cumulative[i]) return i;
    return n - 1;
  }

  static std::uint64_t hash_label(std::string_view label) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Derive a child seed for a named sub-task (per sex, per replicate, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
  return RngStream::mix(RngStream::mix(seed, RngStream::hash_label(label)), index);
}

}  // namespace spmrp

#endif
