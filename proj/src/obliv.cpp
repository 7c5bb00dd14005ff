#include "obliv.hpp"

#include <cassert>
#include <optional>

#include "errors.hpp"

namespace oram3 {

void truncate_layout(SimNet& net, Layout& l, std::size_t n) {
  if (l.permuted) throw ProtocolError("truncate on permuted layout");
  if (n > l.n) throw std::invalid_argument("truncate grows layout");
  for (int b = 0; b < 3; ++b) net.truncate(l.share[b], n);
  l.n = n;
}

namespace {

PositionTuple read_tuple(SimNet& net, const PermTriple& perms, std::size_t i) {
  PositionTuple t;
  for (int s = 0; s < 3; ++s)
    t.p[s] = static_cast<std::uint32_t>(read_perm(net, perms, s, i));
  return t;
}

}  // namespace

CompactResult stable_compact(SimNet& net, Layout&& in, std::size_t link_width,
                             RandomSource& rng) {
  const std::size_t n = in.n;
  if (n == 0) throw std::invalid_argument("compact of empty layout");

  Layout links = alloc_layout(net, "cp.L", n, link_width);
  PermTriple perms = gen_perm_triple(net, n, link_width, rng);

  // Reverse scan: thread one hidden list through the reals and one through
  // the dummies. Each slot's link points at the permuted position of the next
  // element of its own class; the last of a class gets the nil end marker.
  std::optional<PositionTuple> next_real, next_dummy;
  for (std::size_t i = n; i-- > 0;) {
    PositionTuple here = read_tuple(net, perms, i);
    Block e = reconstruct_at(net, in, i);
    bool real = codec::is_real(e);
    secret_write(net, links, i, codec::link_block(link_width, real ? next_real : next_dummy),
                 rng);
    (real ? next_real : next_dummy) = here;
  }
  std::optional<PositionTuple> head_real = next_real;
  std::optional<PositionTuple> head_dummy = next_dummy;

  permute(net, perms, {&in, &links}, rng);

  // Pointer chase: exactly n steps of (reconstruct entry, reconstruct link,
  // re-share output). Hitting the real list's end marker redirects to the
  // dummy head; total steps already count every element once.
  Layout out = alloc_layout(net, "cp.out", n, in.width);
  std::optional<PositionTuple> p = head_real ? head_real : head_dummy;
  bool in_dummies = !head_real;
  std::size_t reals = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!p) throw ProtocolError("compact traversal underrun");
    Block e = reconstruct_tuple(net, in, *p);
    Block lb = reconstruct_tuple(net, links, *p);
    secret_write(net, out, k, e, rng);
    if (!in_dummies) ++reals;
    std::optional<PositionTuple> next = codec::link_tuple(lb);
    if (next) {
      p = next;
    } else if (!in_dummies) {
      p = head_dummy;
      in_dummies = true;
    } else {
      p.reset();
    }
  }

  free_layout(net, in);
  free_layout(net, links);
  free_perm_triple(net, perms);
  return CompactResult{out, reals};
}

namespace {

// Streaming side of the merge traversal: a chain cursor plus a queue of at
// most two prefetched elements. The queue depth never depends on data; only
// which side gets refilled does, and that shows up solely in (hidden) indices.
struct MergeSide {
  std::optional<PositionTuple> ptr;
  std::optional<PositionTuple> dummy_head;
  bool in_dummies = false;
  std::size_t unread = 0;
  Block q[2];
  int q_len = 0;

  void push(const Block& b) { q[q_len++] = b; }
  Block pop() {
    Block b = q[0];
    q[0] = q[1];
    --q_len;
    return b;
  }
};

}  // namespace

MergeResult merge(SimNet& net, Layout&& a, Layout&& b, std::size_t link_width,
                  RandomSource& rng) {
  if (a.n != b.n || a.width != b.width)
    throw std::invalid_argument("merge inputs must have equal length and width");
  if (a.permuted || b.permuted) throw ProtocolError("merge of permuted layout");
  const std::size_t n = a.n;
  const std::size_t m = 2 * n;

  // Concatenate b behind a on every server; pure bookkeeping.
  for (int s = 0; s < 3; ++s) net.concat(a.share[s], b.share[s]);
  Layout u = a;
  u.n = m;
  b = Layout{};

  Layout links = alloc_layout(net, "mg.L", m, link_width);
  PermTriple perms = gen_perm_triple(net, m, link_width, rng);

  // Reverse scan threading four hidden lists: (side, real|dummy).
  std::optional<PositionTuple> next[2][2];
  for (std::size_t i = m; i-- > 0;) {
    PositionTuple here = read_tuple(net, perms, i);
    Block e = reconstruct_at(net, u, i);
    int side = i < n ? 0 : 1;
    int real = codec::is_real(e) ? 1 : 0;
    secret_write(net, links, i, codec::link_block(link_width, next[side][real]), rng);
    next[side][real] = here;
  }

  permute(net, perms, {&u, &links}, rng);

  MergeSide sides[2];
  for (int s = 0; s < 2; ++s) {
    sides[s].dummy_head = next[s][0];
    sides[s].unread = n;
    if (next[s][1]) {
      sides[s].ptr = next[s][1];
    } else {
      sides[s].ptr = next[s][0];
      sides[s].in_dummies = true;
    }
  }

  auto refill = [&](int s) {
    MergeSide& sd = sides[s];
    if (!sd.ptr) throw ProtocolError("merge traversal underrun");
    Block e = reconstruct_tuple(net, u, *sd.ptr);
    Block lb = reconstruct_tuple(net, links, *sd.ptr);
    std::optional<PositionTuple> nx = codec::link_tuple(lb);
    if (nx) {
      sd.ptr = nx;
    } else if (!sd.in_dummies) {
      sd.ptr = sd.dummy_head;
      sd.in_dummies = true;
    } else {
      sd.ptr.reset();
    }
    --sd.unread;
    sd.push(e);
  };

  Layout out = alloc_layout(net, "mg.out", m, u.width);
  std::size_t reals = 0;
  std::size_t reads_done = 2;
  refill(0);
  refill(1);
  for (std::size_t k = 0; k < m; ++k) {
    int side;
    if (sides[0].q_len == 0) {
      side = 1;
    } else if (sides[1].q_len == 0) {
      side = 0;
    } else {
      const Block& f0 = sides[0].q[0];
      const Block& f1 = sides[1].q[0];
      bool r0 = codec::is_real(f0), r1 = codec::is_real(f1);
      if (r0 && r1)
        side = codec::key(f0) <= codec::key(f1) ? 0 : 1;
      else if (r0 != r1)
        side = r0 ? 0 : 1;
      else
        side = static_cast<int>(k & 1);  // dummies: deterministic alternation
    }
    Block e = sides[side].pop();
    if (codec::is_real(e)) ++reals;
    secret_write(net, out, k, e, rng);
    if (reads_done < m) {
      int t = sides[side].unread > 0 ? side : 1 - side;
      refill(t);
      ++reads_done;
    }
  }
  assert(sides[0].q_len == 0 && sides[1].q_len == 0);

  free_layout(net, u);
  free_layout(net, links);
  free_perm_triple(net, perms);
  return MergeResult{out, reals};
}

}  // namespace oram3
