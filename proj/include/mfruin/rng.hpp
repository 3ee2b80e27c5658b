#pragma once

#include <cmath>
#include <cstdint>

namespace mfruin {

// Counter-friendly splitmix64 stream. Each (master seed, stream index) pair
// deterministically selects a starting state, so path-level Monte Carlo can
// assign one stream per path and stay reproducible for any worker count.
//
// The stream state is derived by mixing the index through the splitmix64
// finalizer before combining with the seed; streams are therefore offset by
// pseudo-random 64-bit gaps rather than by the sequence increment itself
// (which would make consecutive streams overlap shifted copies).
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index,
            std::uint64_t lane = 0) {
    state_ = mix_(master_seed + 0x9e3779b97f4a7c15ULL) ^
             mix_(stream_index + 0xbf58476d1ce4e5b9ULL) ^
             mix_(lane + 0x94d049bb133111ebULL);
    seed_ = master_seed;
    index_ = stream_index;
    lane_ = lane;
  }

  // Disjoint child stream for the same (seed, index), e.g. separating the
  // Brownian draws from the fractional draws of one path.
  RngStream fork(std::uint64_t lane) const {
    return RngStream(seed_, index_, lane_ * 0x100000001ULL + lane + 1);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]: 53-bit mantissa, never exactly 0 so log() is safe.
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are cached so one stream yields the
  // same sequence no matter how calls are batched.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static std::uint64_t mix_(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t lane_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mfruin
