#pragma once

#include "pos_oram.hpp"

namespace oram3 {

/// The full store: D+1 position structures, one per address-prefix depth.
/// Depth d keys are the top d bits of an address; depth D holds the data
/// entries, shallower depths hold metadata rows whose two child slots say
/// where the two one-bit-longer prefixes currently live. A single
/// secret-shared root row anchors the chain. Every access fetches along the
/// prefix path and then rebuilds one level per depth on a binary-counter
/// schedule, so the sequence of network events depends only on n and t.
struct OramSystem {
  SimNet net;
  RandomSource rng{0};
  int D = 0;
  std::uint64_t n = 0;
  bool big = false;
  Widths w;
  std::vector<PosOram> depths;
  Layout root;
  std::uint64_t t = 0;  // completed accesses
};

/// n must be a power of two. Eagerly stores value 0 at every address, so the
/// largest level of every depth starts occupied. The in-place form lets a
/// trace sink attached to sys.net beforehand observe the setup traffic too.
void oram_init(OramSystem& sys, std::uint64_t n, std::uint64_t seed, bool big_blocks);
OramSystem make_oram(std::uint64_t n, std::uint64_t seed, bool big_blocks);
void free_oram(OramSystem& sys);

/// One access: returns the value addr held before, and if write_value is
/// present replaces it. Values are truncated to the payload width.
std::uint64_t oram_access(OramSystem& sys, std::uint64_t addr,
                          std::optional<std::uint64_t> write_value);

inline std::uint64_t oram_read(OramSystem& sys, std::uint64_t addr) {
  return oram_access(sys, addr, std::nullopt);
}
inline std::uint64_t oram_write(OramSystem& sys, std::uint64_t addr, std::uint64_t value) {
  return oram_access(sys, addr, value);
}

inline bool oram_level_full(const OramSystem& sys, int depth, int level) {
  return pos_level_full(sys.depths[static_cast<std::size_t>(depth)], level);
}

/// Turns the key/position rows of a freshly rebuilt child-depth level into
/// the parent's update batch: sibling rows fold into one metadata entry with
/// both child slots assigned; a lone row assigns only its own side and marks
/// the other keep-old; dummies stay dummies.
Layout convert_labels(SimNet& net, Layout&& keymap, int level, std::size_t meta_width,
                      RandomSource& rng);

}  // namespace oram3
