#pragma once

#include <cstdint>
#include <cmath>

namespace kinwall {

// Counter-based stream generator (Philox4x32-10). Each particle or probe
// bundle owns its stream id, so the draw sequence depends only on
// (master seed, stream id, draw index) and never on scheduling.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (have_ == 0) {
      fill();
      have_ = 4;
    }
    return buf_[4 - have_--];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // uniform on (0,1]
  double uniform() {
    return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
  }

  double exponential() { return -std::log(uniform()); }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double phi = 6.283185307179586476925286766559 * uniform(0.0, 1.0);
    cached_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void fill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(draw_);
    std::uint32_t c1 = static_cast<std::uint32_t>(draw_ >> 32);
    std::uint32_t c2 = stream_lo_;
    std::uint32_t c3 = stream_hi_;
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = c0;
    buf_[1] = c1;
    buf_[2] = c2;
    buf_[3] = c3;
    ++draw_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t draw_ = 0;
  std::uint32_t buf_[4] = {};
  int have_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Stable 64-bit mix for deriving sub-stream ids from composite indices.
inline std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace kinwall
