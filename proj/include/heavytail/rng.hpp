#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every sampler in the library takes an explicit (seed, stream) pair instead
// of hidden generator state, so any draw sequence can be reproduced from the
// numbers recorded in a run manifest. Streams derived from distinct ids are
// statistically independent and can be consumed concurrently.

#include <array>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heavytail::rng {

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

// One 10-round Philox4x32 block: 128 bits of counter, 64 bits of key.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u;
  constexpr std::uint32_t m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += w0;
      key[1] += w1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(m0, ctr[0], hi0, lo0);
    detail::mulhilo32(m1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// SplitMix64 finalizer; used to mix stream labels into well-spread 64-bit ids.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Combine a stream id with a substream label (e.g. per-subsample, per-rep).
inline std::uint64_t derive_stream(std::uint64_t stream, std::uint64_t substream) {
  return mix64(stream ^ mix64(substream));
}

// Hash a short string label into a stream id.
inline std::uint64_t stream_of(const char* label) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* p = label; *p; ++p) h = (h ^ static_cast<unsigned char>(*p)) * 0x100000001b3ull;
  return mix64(h);
}

// A single random stream: key = seed, counter high half = stream id,
// counter low half = block index. Pure function of (seed, stream, block).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe to pass through log() or tan().
  double next_open_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Exp(1) via inverse CDF.
  double next_exponential() { return -std::log(next_open_double()); }

  // Standard normal, Box-Muller; the paired variate is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_open_double()));
    const double t = 2.0 * std::numbers::pi * next_double();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  void refill() {
    buf_ = philox4x32({block_lo_, block_hi_, stream_lo_, stream_hi_}, key_);
    pos_ = 0;
    if (++block_lo_ == 0) ++block_hi_;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint32_t block_lo_ = 0, block_hi_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace heavytail::rng
