#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace semloss {

/// Purpose-tagged random streams. Consuming one stream never advances
/// another, so e.g. an alpha=0 run that skips sampling is bit-comparable
/// to a pure-NLL run under the same seed.
enum class Stream : int { init = 0, sampling = 1, masking = 2, data = 3 };

/// Seeded deterministic generator: four independent mt19937_64 engines, one
/// per stream, seeded via splitmix64(seed ^ tag). Floating-point draws are
/// mapped from raw bits by hand so sequences are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t bits(Stream s);
  /// Uniform in [0, 1), 53-bit resolution.
  double uniform(Stream s);
  /// Uniform integer in [0, n). Requires n >= 1.
  long uniform_int(Stream s, long n);
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal(Stream s);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(Stream s, std::vector<T>& v) {
    for (long i = static_cast<long>(v.size()) - 1; i > 0; --i) {
      long j = uniform_int(s, i + 1);
      std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
    }
  }

 private:
  std::array<std::mt19937_64, 4> engines_;
};

/// Draws index i with probability probs[i]. Requires entries non-negative
/// and a total within 1e-9 of 1; zero-probability indices are never drawn.
/// Throws SamplingError on a degenerate (all-zero) distribution.
int sample_categorical(std::span<const double> probs, Rng& rng, Stream stream);

uint64_t splitmix64(uint64_t x);

}  // namespace semloss
