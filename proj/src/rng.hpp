#pragma once

#include <cstdint>
#include <cstddef>

namespace oram3 {

/// Deterministic counter-mode randomness. Every protocol invocation pulls a
/// sub-stream derived from (seed, stream id, fork counter), so a run is fully
/// reproducible from one 64-bit seed and traces are stable across replays.
///
/// The `constant` mode is a deliberately broken generator used as a negative
/// control in the statistical audits: it returns the same word forever.
class RandomSource {
public:
  enum class Mode : std::uint8_t { counter, constant };

  // Stream ids for derived sub-streams, one per protocol family.
  enum : std::uint32_t {
    kShareStream = 1,
    kMaskStream = 2,
    kPermStream = 3,
    kWorkloadStream = 4,
  };

  explicit RandomSource(std::uint64_t seed, Mode mode = Mode::counter)
      : base_(seed), ctr_(0), forks_(0), mode_(mode) {}

  Mode mode() const { return mode_; }

  std::uint64_t next_u64() {
    if (mode_ == Mode::constant) return kConstantWord;
    return mix(base_ + kGamma * ++ctr_);
  }

  /// Unbiased draw from [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    if (mode_ == Mode::constant) return kConstantWord % bound;
    // Rejection sampling on the top bits; client-local, so retries never
    // touch the network.
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
    mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

  void fill(std::uint8_t* out, std::size_t n) {
    std::size_t i = 0;
    while (i + 8 <= n) {
      std::uint64_t w = next_u64();
      for (int k = 0; k < 8; ++k) out[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
      i += 8;
    }
    if (i < n) {
      std::uint64_t w = next_u64();
      for (; i < n; ++i) { out[i] = static_cast<std::uint8_t>(w); w >>= 8; }
    }
  }

  /// Derive an independent sub-stream. Copies of the returned source replay
  /// the same sequence, which the permute pass uses to regenerate one mask
  /// triple per index while visiting the three shares in separate passes.
  RandomSource stream(std::uint32_t stream_id) {
    std::uint64_t child = mix(base_ ^ (static_cast<std::uint64_t>(stream_id) << 32) ^ mix(++forks_));
    return RandomSource(child, mode_);
  }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kConstantWord = 0xA5A5A5A5A5A5A5A5ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27; z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t base_;
  std::uint64_t ctr_;
  std::uint64_t forks_;
  Mode mode_;
};

}  // namespace oram3
