#include "semloss/rng.hpp"

#include <cmath>
#include <numbers>

#include "semloss/errors.hpp"

namespace semloss {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) {
  for (int i = 0; i < 4; ++i) {
    engines_[static_cast<size_t>(i)].seed(splitmix64(seed ^ (0x51ed2701ULL + 0x9e3779b9ULL * static_cast<uint64_t>(i))));
  }
}

uint64_t Rng::bits(Stream s) { return engines_[static_cast<size_t>(s)](); }

double Rng::uniform(Stream s) {
  return static_cast<double>(bits(s) >> 11) * 0x1.0p-53;
}

long Rng::uniform_int(Stream s, long n) {
  if (n < 1) throw ContractError("uniform_int: n must be >= 1");
  // Rejection sampling to avoid modulo bias.
  uint64_t un = static_cast<uint64_t>(n);
  uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = bits(s);
  } while (x >= limit);
  return static_cast<long>(x % un);
}

double Rng::normal(Stream s) {
  double u1 = uniform(s);
  while (u1 <= 0.0) u1 = uniform(s);
  double u2 = uniform(s);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int sample_categorical(std::span<const double> probs, Rng& rng, Stream stream) {
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw SamplingError("negative probability in categorical distribution");
    total += p;
  }
  if (total <= 0.0) throw SamplingError("degenerate categorical distribution: all probabilities zero");
  if (std::abs(total - 1.0) > 1e-9) {
    throw SamplingError("categorical distribution sums to " + std::to_string(total) + ", expected 1");
  }
  double u = rng.uniform(stream) * total;
  double cum = 0.0;
  int last_positive = -1;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cum += probs[i];
    last_positive = static_cast<int>(i);
    if (u < cum) return last_positive;
  }
  return last_positive;  // u landed on the rounding tail
}

}  // namespace semloss
