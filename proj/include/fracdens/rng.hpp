#pragma once

#include <cmath>
#include <cstdint>

namespace fracdens {

// Counter-based RNG: every variate is a pure function of (seed, stream, counter),
// so Monte Carlo results do not depend on how work is split across threads.
// The generator is the splitmix64 output function applied to a per-stream base
// plus a Weyl sequence; streams are decorrelated by double mixing of the ids.
namespace rngdetail {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

}  // namespace rngdetail

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream)
      : base_(rngdetail::mix64(rngdetail::mix64(seed + rngdetail::kGolden) ^
                               rngdetail::mix64(stream * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull))),
        ctr_(0) {}

  uint64_t next_u64() { return rngdetail::mix64(base_ + (++ctr_) * rngdetail::kGolden); }

  // uniform on (0,1]
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t base_;
  uint64_t ctr_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream-id layout used throughout the estimators. Keeping allocation in one
// place guarantees distinct (purpose, replica, path) tuples never collide.
inline uint64_t stream_id(uint64_t purpose, uint64_t replica = 0, uint64_t path = 0) {
  return (purpose << 48) ^ (replica << 24) ^ path;
}

}  // namespace fracdens
