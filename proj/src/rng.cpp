#include "isac/rng.hpp"

#include <cmath>

namespace isac::rng {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Substream::Substream(std::uint64_t seed, Stream purpose, std::uint64_t k1,
                     std::uint64_t k2) {
  std::uint64_t s = mix64(seed + kGamma);
  s = mix64(s ^ static_cast<std::uint64_t>(purpose) * kGamma);
  s = mix64(s ^ (k1 + 1) * kGamma);
  s = mix64(s ^ (k2 + 1) * kGamma);
  base_ = s;
}

std::uint64_t Substream::next_u64() {
  return mix64(base_ + ++counter_ * kGamma);
}

double Substream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Substream::gauss() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller; u1 is kept away from zero so the log stays finite.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::complex<double> Substream::cgauss(double var) {
  const double s = std::sqrt(var * 0.5);
  const double re = gauss();
  const double im = gauss();
  return {s * re, s * im};
}

}  // namespace isac::rng
