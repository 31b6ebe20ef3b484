#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic random sampling.
//
// Generator: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Independent streams are derived with splitmix64 so that a run is
// reproducible per (base seed, stream index) regardless of scheduling.
// Poisson sampling is implemented here rather than with
// std::poisson_distribution, whose algorithm is implementation-defined:
// Knuth's product method below mean 30, Hörmann's PTRS transformed rejection
// above. Uniform doubles take the top 53 bits of the generator output.

namespace entbell {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for the index-th independent stream of a run.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(base_seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

// Knuth: count uniforms until their product drops below e^{-mean}.
inline std::uint64_t poisson_knuth(double mean, std::mt19937_64& rng) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = 1.0;
  do {
    ++k;
    prod *= uniform01(rng);
  } while (prod > limit);
  return k - 1;
}

// Hörmann's PTRS transformed rejection; valid for mean >= 10.
inline std::uint64_t poisson_ptrs(double mean, std::mt19937_64& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * loglam - mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace detail

inline std::uint64_t sample_poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) return detail::poisson_knuth(mean, rng);
  return detail::poisson_ptrs(mean, rng);
}

}  // namespace entbell
