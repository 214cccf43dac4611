/**
 * Counter-based random number streams.
 *
 * Every stochastic quantity in the simulator draws from a Substream keyed by
 * (seed, purpose, indices).  A draw is a pure function of the key and a
 * per-stream counter, so trial i always sees the same randomness no matter
 * how trials are batched or scheduled across workers.
 */
#pragma once

#include <complex>
#include <cstdint>

namespace isac::rng {

/** Purpose tags keep independent uses of the seed statistically disjoint. */
enum class Stream : std::uint64_t {
  CommChannels = 1,
  RadarNoiseH0 = 2,
  RadarNoiseH1 = 3,
  TargetGain = 4,
  ClutterGain = 5,
  CommNoise = 6,
  Symbols = 7,
  Probe = 8,
};

/** SplitMix64 output mix; also usable as a standalone integer hash. */
std::uint64_t mix64(std::uint64_t z);

/**
 * One independent random stream.  Construction hashes the seed and up to
 * three key words; draws then walk a Weyl sequence through the mixer.
 */
class Substream {
 public:
  Substream(std::uint64_t seed, Stream purpose, std::uint64_t k1 = 0,
            std::uint64_t k2 = 0);

  std::uint64_t next_u64();
  /** Uniform on [0, 1) with 53 random bits. */
  double uniform();
  /** Standard normal via Box-Muller (pairs cached). */
  double gauss();
  /** Circularly symmetric complex normal with E|z|^2 = var. */
  std::complex<double> cgauss(double var);

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace isac::rng
