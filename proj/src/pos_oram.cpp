#include "pos_oram.hpp"

#include <cassert>

#include "errors.hpp"

namespace oram3 {

PosOram make_pos_oram(int d, std::size_t entry_width, const Widths& w) {
  PosOram p;
  p.d = d;
  p.entry_width = entry_width;
  p.w = w;
  p.levels.resize(static_cast<std::size_t>(d) + 1);
  return p;
}

void free_pos_oram(SimNet& net, PosOram& p) {
  for (OtmState& lv : p.levels) free_otm(net, lv);
  free_otm(net, p.staging);
}

Block pos_lookup(SimNet& net, PosOram& p, std::uint64_t key, const codec::ChildLabel& label,
                 RandomSource& rng) {
  if (label.status != codec::kChildAssigned)
    throw ProtocolError("fetch followed an unassigned position label");
  if (label.level > p.d || !pos_level_full(p, label.level))
    throw ProtocolError("position label points into an empty level");
  Block found(p.entry_width);
  for (int j = 0; j <= p.d; ++j) {
    OtmState& lv = p.levels[static_cast<std::size_t>(j)];
    if (!lv.alive) continue;
    if (j == label.level) {
      found = otm_lookup(net, lv, key, label.pos, rng);
    } else {
      otm_lookup(net, lv, std::nullopt, std::nullopt, rng);
    }
  }
  return found;
}

void place_fetched(SimNet& net, PosOram& p, const Block& entry, RandomSource& rng) {
  assert(!p.staging.alive);
  Layout one = alloc_layout(net, "stage.in", 1, p.entry_width);
  secret_write(net, one, 0, entry, rng);
  OtmBuild b = otm_build(net, std::move(one), p.w, rng);
  free_layout(net, b.keymap);
  p.staging = b.st;
}

void mark_duplicates(SimNet& net, Layout& l, RandomSource& rng) {
  bool have_prev = false;
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < l.n; ++i) {
    Block e = reconstruct_at(net, l, i);
    if (codec::is_real(e)) {
      if (have_prev && codec::key(e) == prev) {
        e = codec::dummy_entry(l.width);
      } else {
        have_prev = true;
        prev = codec::key(e);
      }
    }
    secret_write(net, l, i, e, rng);
  }
}

void scan_update(SimNet& net, Layout& l, RandomSource& rng) {
  if (l.n == 0) return;
  Block hold = reconstruct_at(net, l, 0);
  for (std::size_t i = 1; i < l.n; ++i) {
    Block cur = reconstruct_at(net, l, i);
    if (codec::is_real(hold) && codec::is_real(cur) && codec::key(hold) == codec::key(cur)) {
      for (int side = 0; side < 2; ++side) {
        codec::ChildLabel cl = codec::meta_child(cur, side);
        if (cl.status == codec::kChildAssigned) codec::set_meta_child(hold, side, cl);
      }
      cur = codec::dummy_entry(l.width);
    }
    secret_write(net, l, i - 1, hold, rng);
    hold = cur;
  }
  secret_write(net, l, l.n - 1, hold, rng);
}

Layout pos_shuffle(SimNet& net, PosOram& p, Layout&& update, int l, RandomSource& rng) {
  assert(l >= 0 && l <= p.d);
  if (!p.staging.alive) throw ProtocolError("shuffle without a staged fetch");
  Layout acc = otm_getall(net, p.staging, rng);
  const int last = (l == p.d) ? p.d : l - 1;
  for (int j = 0; j <= last; ++j) {
    OtmState& lv = p.levels[static_cast<std::size_t>(j)];
    if (!lv.alive) throw ProtocolError("shuffle expected an occupied level");
    Layout drained = otm_getall(net, lv, rng);
    acc = merge(net, std::move(acc), std::move(drained), p.w.link, rng).out;
  }

  mark_duplicates(net, acc, rng);
  CompactResult survivors = stable_compact(net, std::move(acc), p.w.link, rng);
  const std::size_t cap = std::size_t{1} << l;
  if (survivors.real_count > cap) throw ProtocolError("level capacity exceeded before update");
  truncate_layout(net, survivors.out, cap);

  if (update.n > cap) {
    CompactResult packed = stable_compact(net, std::move(update), p.w.link, rng);
    if (packed.real_count > cap) throw ProtocolError("update batch exceeds level capacity");
    truncate_layout(net, packed.out, cap);
    update = packed.out;
  }
  assert(update.n == cap && update.width == p.entry_width);

  MergeResult folded = merge(net, std::move(survivors.out), std::move(update), p.w.link, rng);
  scan_update(net, folded.out, rng);
  CompactResult fresh = stable_compact(net, std::move(folded.out), p.w.link, rng);
  if (fresh.real_count > cap) throw ProtocolError("level capacity exceeded after update");
  truncate_layout(net, fresh.out, cap);

  OtmBuild built = otm_build(net, std::move(fresh.out), p.w, rng);
  p.levels[static_cast<std::size_t>(l)] = built.st;
  return built.keymap;
}

}  // namespace oram3
