#include "pmfpair/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "pmfpair/constants.hpp"

namespace pmfpair::rng {

namespace {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Good avalanche behaviour,
// which is what makes the tag/index mixing in derive_stream sound.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; reject u1 = 0 to keep log finite
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * pi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * pi * u2);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ tag);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

namespace {

// Sequential inversion: walk the CDF term by term. Only used for small means
// so the loop stays short.
std::int64_t poisson_inversion(double mean, SplitMix64& gen) {
  const double u = gen.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf && k < 2000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

double log_factorial(double k) { return std::lgamma(k + 1.0); }

// PTRS transformed-rejection sampler, valid for mean >= 10.
std::int64_t poisson_ptrs(double mean, SplitMix64& gen) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u = gen.uniform() - 0.5;
    double v = gen.uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::int64_t>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mean - mean - log_factorial(kf);
    if (lhs <= rhs) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace

std::int64_t poisson(double mean, SplitMix64& gen) {
  if (mean < 0.0 || !std::isfinite(mean)) {
    throw std::domain_error("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) {
    return 0;
  }
  if (mean < 10.0) {
    return poisson_inversion(mean, gen);
  }
  return poisson_ptrs(mean, gen);
}

}  // namespace pmfpair::rng
