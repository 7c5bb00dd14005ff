#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>

#include "rng.hpp"

namespace oram3 {

/// Widest block any configuration uses (big-block payloads stay well below).
inline constexpr std::size_t kMaxBlockBytes = 128;

/// Fixed-width byte string; the unit of storage and transfer. Inline storage
/// keeps server arrays contiguous and block copies allocation-free, which the
/// bandwidth benches depend on. Bytes past width() are kept zero so XOR can
/// run on whole 64-bit lanes.
class Block {
public:
  Block() : width_(0) { lanes_.fill(0); }

  explicit Block(std::size_t width) : width_(static_cast<std::uint32_t>(width)) {
    if (width == 0 || width > kMaxBlockBytes)
      throw std::invalid_argument("block width out of range");
    lanes_.fill(0);
  }

  static Block random(std::size_t width, RandomSource& rng) {
    Block b(width);
    rng.fill(b.data(), width);
    return b;
  }

  std::size_t width() const { return width_; }
  bool empty() const { return width_ == 0; }

  std::uint8_t* data() { return reinterpret_cast<std::uint8_t*>(lanes_.data()); }
  const std::uint8_t* data() const { return reinterpret_cast<const std::uint8_t*>(lanes_.data()); }

  void xor_with(const Block& o) {
    if (o.width_ != width_) throw std::invalid_argument("xor width mismatch");
    std::size_t lanes = (width_ + 7) / 8;
    for (std::size_t i = 0; i < lanes; ++i) lanes_[i] ^= o.lanes_[i];
  }

  bool is_zero() const {
    std::size_t lanes = (width_ + 7) / 8;
    for (std::size_t i = 0; i < lanes; ++i)
      if (lanes_[i] != 0) return false;
    return true;
  }

  friend bool operator==(const Block& a, const Block& b) {
    if (a.width_ != b.width_) return false;
    return std::memcmp(a.data(), b.data(), a.width_) == 0;
  }
  friend bool operator!=(const Block& a, const Block& b) { return !(a == b); }

  // Little-endian field accessors used by the wire encodings.
  std::uint64_t get_le(std::size_t off, std::size_t nbytes) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < nbytes; ++i)
      v |= static_cast<std::uint64_t>(data()[off + i]) << (8 * i);
    return v;
  }
  void put_le(std::size_t off, std::size_t nbytes, std::uint64_t v) {
    for (std::size_t i = 0; i < nbytes; ++i)
      data()[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

private:
  std::array<std::uint64_t, kMaxBlockBytes / 8> lanes_;
  std::uint32_t width_;
};

inline Block xor_blocks(const Block& a, const Block& b) {
  Block r = a;
  r.xor_with(b);
  return r;
}

}  // namespace oram3
