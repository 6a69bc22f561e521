#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vrjp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used only to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name) {
  return mix64(master ^ mix64(fnv1a(name)));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Rng& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

// Inverse Gaussian with mean mu and shape lambda (Michael, Schucany and Haas).
double sample_inverse_gaussian(double mu, double lambda, Rng& rng);

// Gamma(1/2, rate 1) as half a squared standard normal.
inline double sample_gamma_half(Rng& rng) {
  const double z = standard_normal(rng);
  return 0.5 * z * z;
}

}  // namespace vrjp
