#pragma once

#include <cstdint>
#include <initializer_list>

namespace pmfpair::rng {

// Counter-based generator (SplitMix64 output function over an incrementing
// counter). Every random quantity in the toolkit draws from a stream derived
// from the user seed plus a purpose tag and record indices, so results are
// reproducible bit for bit regardless of evaluation order or thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform double in [0, 1) with 53 random bits
  double uniform();

  // standard normal via Box-Muller; consumes two uniforms per pair
  double normal();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a seed with a purpose tag and up to three indices into an
// independent substream seed. Tags keep streams for different purposes
// (count simulation, bootstrap resampling, optimizer restarts, ...) disjoint
// even when the indices collide.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0);

// Stream purpose tags.
inline constexpr std::uint64_t stream_counts = 1;
inline constexpr std::uint64_t stream_bootstrap = 2;
inline constexpr std::uint64_t stream_restart = 3;
inline constexpr std::uint64_t stream_sweep = 4;
inline constexpr std::uint64_t stream_state = 5;
inline constexpr std::uint64_t stream_bootstrap_mle = 6;

// Poisson sample with the given mean. Uses sequential inversion for small
// means and the PTRS transformed-rejection sampler (Hormann 1993) for
// mean >= 10, so the cost stays O(1) for the large photon counts that
// dominate tomography simulation. mean = 0 returns 0; mean < 0 throws.
std::int64_t poisson(double mean, SplitMix64& gen);

}  // namespace pmfpair::rng
