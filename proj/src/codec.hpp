#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "block.hpp"

namespace oram3 {

/// One physical index per server; how linked structures address a shared slot.
struct PositionTuple {
  std::uint32_t p[3] = {0, 0, 0};
  friend bool operator==(const PositionTuple& a, const PositionTuple& b) {
    return a.p[0] == b.p[0] && a.p[1] == b.p[1] && a.p[2] == b.p[2];
  }
};

// Fixed-field little-endian block encodings. All multi-byte integers are LE.
//
//   entry block:  [tag:1][key:8][payload:width-9]
//   link block:   [valid:1][idx0:4][idx1:4][idx2:4]   (a PositionTuple or nil)
//   index block:  [value:8]                           (permutation entries)
//   meta payload: two child slots at offsets 9 and 23, each
//                 [status:1][level:1][idx0:4][idx1:4][idx2:4]
namespace codec {

enum : std::uint8_t { kTagDummy = 0, kTagReal = 1, kTagSpecialDummy = 2 };
enum : std::uint8_t { kChildKeepOld = 0, kChildAssigned = 1 };

inline constexpr std::size_t kEntryHeader = 9;      // tag + key
inline constexpr std::size_t kLinkBytes = 13;       // valid + 3 indices
inline constexpr std::size_t kChildSlotBytes = 14;  // status + level + 3 indices
inline constexpr std::size_t kMetaMinWidth = kEntryHeader + 2 * kChildSlotBytes;

inline std::uint8_t tag(const Block& b) { return b.data()[0]; }
inline bool is_real(const Block& b) { return tag(b) == kTagReal; }
inline bool is_dummy(const Block& b) { return tag(b) == kTagDummy; }
inline std::uint64_t key(const Block& b) { return b.get_le(1, 8); }

inline std::size_t payload_bytes(std::size_t width) {
  if (width < kEntryHeader + 1) throw std::invalid_argument("entry width too small");
  return width - kEntryHeader;
}

inline Block dummy_entry(std::size_t width) {
  Block b(width);  // zero block: dummy tag, absent key, zero payload
  return b;
}

inline Block real_entry(std::size_t width, std::uint64_t key, std::uint64_t payload = 0) {
  Block b(width);
  b.data()[0] = kTagReal;
  b.put_le(1, 8, key);
  std::size_t pb = payload_bytes(width);
  b.put_le(kEntryHeader, pb < 8 ? pb : 8, payload);
  return b;
}

inline Block special_dummy(std::size_t width, std::uint64_t ordinal) {
  Block b(width);
  b.data()[0] = kTagSpecialDummy;
  b.put_le(1, 8, ordinal);
  return b;
}

/// Largest value the payload field can carry (56-bit for 16-byte blocks).
inline std::uint64_t payload_mask(std::size_t width) {
  std::size_t pb = payload_bytes(width);
  if (pb >= 8) return ~0ull;
  return (1ull << (8 * pb)) - 1;
}

inline std::uint64_t payload_u64(const Block& b) {
  std::size_t pb = payload_bytes(b.width());
  return b.get_le(kEntryHeader, pb < 8 ? pb : 8);
}

inline void set_payload_u64(Block& b, std::uint64_t v) {
  std::size_t pb = payload_bytes(b.width());
  b.put_le(kEntryHeader, pb < 8 ? pb : 8, v);
}

// ---- links ----------------------------------------------------------------

inline Block nil_link(std::size_t width) {
  if (width < kLinkBytes) throw std::invalid_argument("link width too small");
  return Block(width);
}

inline Block link_block(std::size_t width, const PositionTuple& t) {
  Block b = nil_link(width);
  b.data()[0] = 1;
  for (int i = 0; i < 3; ++i) b.put_le(1 + 4 * static_cast<std::size_t>(i), 4, t.p[i]);
  return b;
}

inline Block link_block(std::size_t width, const std::optional<PositionTuple>& t) {
  return t ? link_block(width, *t) : nil_link(width);
}

inline bool link_valid(const Block& b) { return b.data()[0] != 0; }

inline std::optional<PositionTuple> link_tuple(const Block& b) {
  if (!link_valid(b)) return std::nullopt;
  PositionTuple t;
  for (int i = 0; i < 3; ++i)
    t.p[i] = static_cast<std::uint32_t>(b.get_le(1 + 4 * static_cast<std::size_t>(i), 4));
  return t;
}

// ---- permutation entries ---------------------------------------------------

inline Block index_block(std::size_t width, std::uint64_t v) {
  if (width < 8) throw std::invalid_argument("index width too small");
  Block b(width);
  b.put_le(0, 8, v);
  return b;
}

inline std::uint64_t index_value(const Block& b) { return b.get_le(0, 8); }

// ---- position-map payloads --------------------------------------------------

/// Where one logical child lives: a level of the child-depth structure plus a
/// per-server position tuple. status == kChildKeepOld marks "keep whatever the
/// stored entry already has" in update arrays.
struct ChildLabel {
  std::uint8_t status = kChildKeepOld;
  std::uint8_t level = 0;
  PositionTuple pos;
};

inline ChildLabel meta_child(const Block& b, int side) {
  std::size_t off = kEntryHeader + static_cast<std::size_t>(side) * kChildSlotBytes;
  ChildLabel c;
  c.status = b.data()[off];
  c.level = b.data()[off + 1];
  for (int i = 0; i < 3; ++i)
    c.pos.p[i] = static_cast<std::uint32_t>(b.get_le(off + 2 + 4 * static_cast<std::size_t>(i), 4));
  return c;
}

inline void set_meta_child(Block& b, int side, const ChildLabel& c) {
  if (b.width() < kMetaMinWidth) throw std::invalid_argument("meta width too small");
  std::size_t off = kEntryHeader + static_cast<std::size_t>(side) * kChildSlotBytes;
  b.data()[off] = c.status;
  b.data()[off + 1] = c.level;
  for (int i = 0; i < 3; ++i)
    b.put_le(off + 2 + 4 * static_cast<std::size_t>(i), 4, c.pos.p[i]);
}

// ---- key/position rows (build output) ---------------------------------------

inline constexpr std::size_t kKeyPosMinWidth = kEntryHeader + 12;

inline Block keypos_row(std::size_t width, bool real, std::uint64_t key, const PositionTuple& t) {
  if (width < kKeyPosMinWidth) throw std::invalid_argument("keypos width too small");
  Block b(width);
  b.data()[0] = real ? kTagReal : kTagDummy;
  if (real) b.put_le(1, 8, key);
  for (int i = 0; i < 3; ++i) b.put_le(kEntryHeader + 4 * static_cast<std::size_t>(i), 4, t.p[i]);
  return b;
}

inline PositionTuple keypos_tuple(const Block& b) {
  PositionTuple t;
  for (int i = 0; i < 3; ++i)
    t.p[i] = static_cast<std::uint32_t>(b.get_le(kEntryHeader + 4 * static_cast<std::size_t>(i), 4));
  return t;
}

}  // namespace codec

/// Per-role block widths for one system instance. Fixed defaults; big-block
/// mode scales the payload ~log^2 N bits and the auxiliary roles ~log N bits.
struct Widths {
  std::size_t data = 16;
  std::size_t meta = 40;
  std::size_t link = 16;
  std::size_t label = 24;

  static Widths fixed() { return Widths{}; }

  static Widths big_block(int depth_bits) {
    std::size_t d = static_cast<std::size_t>(depth_bits);
    Widths w;
    std::size_t payload = (d * d + 1) / 2;
    w.data = std::max<std::size_t>(16, codec::kEntryHeader + payload);
    w.meta = std::max<std::size_t>(40, 5 * d);
    w.link = std::max<std::size_t>(16, 2 * d);
    w.label = std::max<std::size_t>(24, 3 * d);
    return w;
  }
};

}  // namespace oram3
