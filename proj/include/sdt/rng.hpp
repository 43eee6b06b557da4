#pragma once

// Counter-based random streams. Every stream is a pure function of
// (master seed, state index, replicate index), so a grid sweep yields the
// same numbers whatever the evaluation order or thread count.
//
// The generator is Philox4x32-10 (Salmon et al., SC 2011):
//   key     = master seed (two 32-bit words)
//   counter = [block, replicate, state low word, state high word]

#include <array>
#include <cstdint>

namespace sdt {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with ten rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer; used to fold salts into a seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t state_index, std::uint32_t replicate_index);

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Bernoulli(q) from one 32-bit word. q = 0 and q = 1 are exact; other
  /// probabilities are resolved to 2^-32.
  bool bernoulli(double q) { return next_u32() < bernoulli_threshold(q); }

  static std::uint64_t bernoulli_threshold(double q) {
    if (q <= 0.0) return 0;
    if (q >= 1.0) return std::uint64_t{1} << 32;
    return static_cast<std::uint64_t>(q * 0x1.0p32);
  }

  /// Bernoulli draw against a precomputed threshold.
  bool below(std::uint64_t threshold) { return next_u32() < threshold; }

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter buffer_{};
  int pos_ = 4;
};

/// The per-(state, replicate) stream.
inline Stream derive_stream(std::uint64_t master_seed, std::uint64_t state_index,
                            std::uint32_t replicate_index) {
  return Stream(master_seed, state_index, replicate_index);
}

}  // namespace sdt
