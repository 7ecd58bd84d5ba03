#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace dbf {

/* splitmix64 step, used to fan a master seed out into independent
   sub-streams (workload sampling, policy init, action sampling, shuffles)
   without correlated low bits. */
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

/* Samplers below are hand-rolled on top of mt19937_64 because the standard
   distributions are implementation-defined; identical seeds must reproduce
   identical traces on any toolchain. */

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

inline double sample_exponential(std::mt19937_64& rng, double rate) {
  // Inverse CDF; guard the log away from 0.
  double u = uniform01(rng);
  if (u <= 0.0) u = 0x1.0p-53;
  return -std::log(u) / rate;
}

inline double sample_standard_normal(std::mt19937_64& rng) {
  // Box-Muller without caching the second variate, so the stream position
  // stays a pure function of the number of calls.
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Draws an index from an explicit probability vector (assumed normalized).
inline int sample_categorical(std::mt19937_64& rng, std::span<const double> probs) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;  // rounding residue
}

}  // namespace dbf
