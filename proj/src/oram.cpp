#include "oram.hpp"

#include <bit>
#include <cassert>

#include "errors.hpp"

namespace oram3 {

namespace {

bool row_real(const Block& b) { return codec::is_real(b); }

Block convert_pair(std::size_t meta_width, int level, const std::optional<Block>& prev,
                   const Block& cur, const Block* next) {
  if (!row_real(cur)) return codec::dummy_entry(meta_width);
  const std::uint64_t a = codec::key(cur);
  codec::ChildLabel keep;  // status kChildKeepOld, zero tuple
  codec::ChildLabel own;
  own.status = codec::kChildAssigned;
  own.level = static_cast<std::uint8_t>(level);
  own.pos = codec::keypos_tuple(cur);

  Block e = codec::real_entry(meta_width, a >> 1, 0);
  if (a & 1) {
    if (prev && row_real(*prev) && codec::key(*prev) == a - 1)
      return codec::dummy_entry(meta_width);  // absorbed by the sibling row before it
    codec::set_meta_child(e, 0, keep);
    codec::set_meta_child(e, 1, own);
    return e;
  }
  codec::set_meta_child(e, 0, own);
  if (next && row_real(*next) && codec::key(*next) == a + 1) {
    codec::ChildLabel sib;
    sib.status = codec::kChildAssigned;
    sib.level = static_cast<std::uint8_t>(level);
    sib.pos = codec::keypos_tuple(*next);
    codec::set_meta_child(e, 1, sib);
  } else {
    codec::set_meta_child(e, 1, keep);
  }
  return e;
}

}  // namespace

Layout convert_labels(SimNet& net, Layout&& keymap, int level, std::size_t meta_width,
                      RandomSource& rng) {
  const std::size_t m = keymap.n;
  assert(m > 0);
  Layout out = alloc_layout(net, "cv.out", m, meta_width);
  std::optional<Block> prev;
  Block cur = reconstruct_at(net, keymap, 0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    Block next = reconstruct_at(net, keymap, j + 1);
    secret_write(net, out, j, convert_pair(meta_width, level, prev, cur, &next), rng);
    prev = cur;
    cur = next;
  }
  secret_write(net, out, m - 1, convert_pair(meta_width, level, prev, cur, nullptr), rng);
  free_layout(net, keymap);
  return out;
}

OramSystem make_oram(std::uint64_t n, std::uint64_t seed, bool big_blocks) {
  OramSystem sys;
  oram_init(sys, n, seed, big_blocks);
  return sys;
}

void oram_init(OramSystem& sys, std::uint64_t n, std::uint64_t seed, bool big_blocks) {
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("capacity must be a power of two >= 2");
  sys.n = n;
  sys.D = std::bit_width(n) - 1;
  sys.big = big_blocks;
  sys.w = big_blocks ? Widths::big_block(sys.D) : Widths::fixed();
  sys.rng = RandomSource(seed);
  sys.depths.clear();
  for (int d = 0; d <= sys.D; ++d)
    sys.depths.push_back(make_pos_oram(d, d == sys.D ? sys.w.data : sys.w.meta, sys.w));

  // Every address starts holding 0. Building bottom-up keeps the largest
  // level of each depth occupied from the first access on.
  Layout all = alloc_layout(sys.net, "init", n, sys.w.data);
  for (std::uint64_t i = 0; i < n; ++i)
    secret_write(sys.net, all, i, codec::real_entry(sys.w.data, i, 0), sys.rng);
  OtmBuild built = otm_build(sys.net, std::move(all), sys.w, sys.rng);
  sys.depths[static_cast<std::size_t>(sys.D)].levels[static_cast<std::size_t>(sys.D)] = built.st;
  Layout km = built.keymap;
  for (int d = sys.D - 1; d >= 0; --d) {
    Layout u = convert_labels(sys.net, std::move(km), d + 1, sys.w.meta, sys.rng);
    CompactResult packed = stable_compact(sys.net, std::move(u), sys.w.link, sys.rng);
    const std::size_t cap = std::size_t{1} << d;
    if (packed.real_count != cap) throw ProtocolError("init produced a short depth");
    truncate_layout(sys.net, packed.out, cap);
    OtmBuild lvl = otm_build(sys.net, std::move(packed.out), sys.w, sys.rng);
    sys.depths[static_cast<std::size_t>(d)].levels[static_cast<std::size_t>(d)] = lvl.st;
    km = lvl.keymap;
  }
  sys.root = km;
}

void free_oram(OramSystem& sys) {
  for (PosOram& p : sys.depths) free_pos_oram(sys.net, p);
  if (sys.root.valid()) free_layout(sys.net, sys.root);
}

std::uint64_t oram_access(OramSystem& sys, std::uint64_t addr,
                          std::optional<std::uint64_t> write_value) {
  if (addr >= sys.n) throw std::invalid_argument("address out of range");
  const int D = sys.D;

  Block root_row = reconstruct_at(sys.net, sys.root, 0);
  assert(codec::is_real(root_row) && codec::key(root_row) == 0);
  codec::ChildLabel label;
  label.status = codec::kChildAssigned;
  label.level = 0;
  label.pos = codec::keypos_tuple(root_row);

  std::uint64_t old_value = 0;
  for (int d = 0; d <= D; ++d) {
    PosOram& pd = sys.depths[static_cast<std::size_t>(d)];
    const std::uint64_t key = addr >> (D - d);
    Block e = pos_lookup(sys.net, pd, key, label, sys.rng);
    if (d < D) {
      const int bit = static_cast<int>((addr >> (D - d - 1)) & 1);
      label = codec::meta_child(e, bit);
      if (label.status != codec::kChildAssigned)
        throw ProtocolError("stored entry lacks a child position");
    } else {
      old_value = codec::payload_u64(e);
      if (write_value) codec::set_payload_u64(e, *write_value);
    }
    place_fetched(sys.net, pd, e, sys.rng);
  }

  const int lD = std::min<int>(static_cast<int>(std::countr_one(sys.t)), D);
  Layout u = alloc_layout(sys.net, "upd", std::size_t{1} << lD, sys.w.data);
  for (std::size_t i = 0; i < u.n; ++i)
    secret_write(sys.net, u, i, codec::dummy_entry(sys.w.data), sys.rng);

  for (int d = D; d >= 0; --d) {
    const int l = std::min(d, lD);
    Layout km = pos_shuffle(sys.net, sys.depths[static_cast<std::size_t>(d)], std::move(u), l,
                            sys.rng);
    if (d > 0) {
      u = convert_labels(sys.net, std::move(km), l, sys.w.meta, sys.rng);
    } else {
      free_layout(sys.net, sys.root);
      sys.root = km;
    }
  }
  ++sys.t;
  return old_value;
}

}  // namespace oram3
