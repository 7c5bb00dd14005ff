#include "otm.hpp"

#include <cassert>

#include "errors.hpp"

namespace oram3 {

namespace {

PositionTuple perm_tuple(SimNet& net, const PermTriple& perms, std::size_t i) {
  PositionTuple t;
  for (int s = 0; s < 3; ++s) t.p[s] = static_cast<std::uint32_t>(read_perm(net, perms, s, i));
  return t;
}

}  // namespace

OtmBuild otm_build(SimNet& net, Layout&& input, const Widths& w, RandomSource& rng) {
  if (input.n == 0) throw std::invalid_argument("empty build input");
  if (input.permuted) throw ProtocolError("build input must be plain");
  const std::size_t n = input.n;
  const std::size_t m = 2 * n;

  OtmBuild out;
  OtmState& st = out.st;
  st.n = n;
  st.data = input;
  input = Layout{};

  // Double the address space so each of the n allowed lookups can burn one
  // special dummy slot when it has no real target.
  Layout pad = alloc_layout(net, "otm.pad", n, st.data.width);
  for (int b = 0; b < 3; ++b) net.concat(st.data.share[b], pad.share[b]);
  st.data.n = m;

  st.perms = gen_perm_triple(net, m, w.link, rng);
  for (std::size_t i = 0; i < n; ++i)
    secret_write(net, st.data, n + i, codec::special_dummy(st.data.width, i + 1), rng);

  // Chain the special dummies through their permuted homes. The last one and
  // every original slot get nil links.
  st.links = alloc_layout(net, "otm.links", m, w.link);
  for (std::size_t i = 0; i < m; ++i) {
    Block lb = codec::nil_link(w.link);
    if (i >= n && i + 1 < m) lb = codec::link_block(w.link, perm_tuple(net, st.perms, i + 1));
    secret_write(net, st.links, i, lb, rng);
  }

  st.dpos = alloc_layout(net, "otm.dpos", 1, w.link);
  secret_write(net, st.dpos, 0, codec::link_block(w.link, perm_tuple(net, st.perms, n)), rng);

  out.keymap = alloc_layout(net, "otm.keymap", n, w.label);
  for (std::size_t i = 0; i < n; ++i) {
    Block e = reconstruct_at(net, st.data, i);
    Block row = codec::keypos_row(w.label, codec::is_real(e), codec::key(e),
                                  perm_tuple(net, st.perms, i));
    secret_write(net, out.keymap, i, row, rng);
  }

  permute(net, st.perms, {&st.data, &st.links}, rng);
  st.alive = true;
  return out;
}

Block otm_lookup(SimNet& net, OtmState& st, const std::optional<std::uint64_t>& key,
                 const std::optional<PositionTuple>& pos, RandomSource& rng) {
  if (!st.alive) throw ProtocolError("lookup on a drained structure");
  if (st.lookups_done >= st.n) throw ProtocolError("lookup capacity exhausted");
  if (key.has_value() != pos.has_value())
    throw std::invalid_argument("real lookup needs key and position together");

  Block dlink = reconstruct_at(net, st.dpos, 0);
  std::optional<PositionTuple> dtuple = codec::link_tuple(dlink);
  const bool real = key.has_value();
  assert(dtuple.has_value());

  PositionTuple target = real ? *pos : *dtuple;
  Block entry = reconstruct_tuple(net, st.data, target);
  Block link = reconstruct_tuple(net, st.links, target);

  if (real) {
    assert(codec::is_real(entry) && codec::key(entry) == *key);
  } else {
    assert(codec::tag(entry) == codec::kTagSpecialDummy);
    dtuple = codec::link_tuple(link);
  }
  secret_write(net, st.dpos, 0, codec::link_block(st.dpos.width, dtuple), rng);

  ++st.lookups_done;
  return entry;
}

Layout otm_getall(SimNet& net, OtmState& st, RandomSource& rng) {
  if (!st.alive) throw ProtocolError("getall on a drained structure");
  unpermute(net, st.perms, {&st.data, &st.links}, rng);
  free_perm_triple(net, st.perms);
  free_layout(net, st.links);
  free_layout(net, st.dpos);
  truncate_layout(net, st.data, st.n);
  st.alive = false;
  Layout drained = st.data;
  st.data = Layout{};
  return drained;
}

void free_otm(SimNet& net, OtmState& st) {
  if (!st.alive) return;
  free_layout(net, st.data);
  free_layout(net, st.links);
  free_layout(net, st.dpos);
  free_perm_triple(net, st.perms);
  st.alive = false;
}

}  // namespace oram3
