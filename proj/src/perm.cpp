#include "perm.hpp"

#include <cassert>
#include <vector>

#include "errors.hpp"

namespace oram3 {

StoredPermutation gen_random_perm(SimNet& net, int server, std::size_t n, std::size_t width,
                                  RandomSource& rng) {
  StoredPermutation p;
  p.server = server;
  p.n = n;
  p.arr = net.alloc(server, "perm", n, width);
  // Inside-out Fisher-Yates, swaps executed remotely. Every step is one read
  // plus two writes regardless of the drawn index, so the wire pattern
  // depends only on n. Draws are client-local and cost nothing.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    Block aj = net.read_block(p.arr, j);
    net.write_block(p.arr, i, aj);
    net.write_block(p.arr, j, codec::index_block(width, i));
  }
  return p;
}

PermTriple gen_perm_triple(SimNet& net, std::size_t n, std::size_t width, RandomSource& rng) {
  PermTriple t;
  t.n = n;
  for (int b = 0; b < 3; ++b) {
    int s = (b + 1) % 3;
    t.perm[s] = gen_random_perm(net, b, n, width, rng);
  }
  return t;
}

void free_perm_triple(SimNet& net, PermTriple& t) {
  for (int s = 0; s < 3; ++s) {
    if (t.perm[s].arr.valid()) net.free_array(t.perm[s].arr);
    t.perm[s] = StoredPermutation{};
  }
  t.n = 0;
}

std::uint64_t read_perm(SimNet& net, const PermTriple& t, int share, std::size_t i) {
  return codec::index_value(net.read_block(t.perm[share].arr, i));
}

namespace {

// Draws the zero-sum mask triple for one index of one layout and returns the
// share asked for. Each per-share pass replays the same stream, so all three
// passes see identical triples.
Block mask_share(RandomSource& mrng, std::size_t width, int share) {
  Block b0 = Block::random(width, mrng);
  Block b1 = Block::random(width, mrng);
  if (share == 0) return b0;
  if (share == 1) return b1;
  Block b2 = xor_blocks(b0, b1);
  assert(xor_blocks(xor_blocks(b0, b1), b2).is_zero());
  return b2;
}

}  // namespace

void permute(SimNet& net, const PermTriple& perms, std::initializer_list<Layout*> layouts,
             RandomSource& rng) {
  std::size_t n = perms.n;
  for (Layout* l : layouts) {
    if (l->n != n) throw std::invalid_argument("permute length mismatch");
    if (l->permuted) throw ProtocolError("layout already permuted");
  }
  RandomSource mask_stream = rng.stream(RandomSource::kMaskStream);

  std::vector<SimNet::ArrayHandle> new_storage(layouts.size());
  std::vector<SimNet::ArrayHandle> new_mirror(layouts.size());
  for (int b = 0; b < 3; ++b) {
    int s = (b + 1) % 3;
    std::size_t li = 0;
    for (Layout* l : layouts) {
      new_mirror[li] = net.alloc(b, "pm.mir", n, l->width);
      new_storage[li] = net.alloc(s, "pm.out", n, l->width, /*read_once_guard=*/true);
      ++li;
    }
    RandomSource mrng = mask_stream;  // replayed identically for each share
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t dst = static_cast<std::size_t>(read_perm(net, perms, s, i));
      li = 0;
      for (Layout* l : layouts) {
        Block v = net.read_block(l->share[s], i);
        v.xor_with(mask_share(mrng, l->width, s));
        net.write_block(new_mirror[li], dst, v);
        net.write_block(new_storage[li], dst, v);
        ++li;
      }
    }
    li = 0;
    for (Layout* l : layouts) {
      net.free_array(l->share[s]);
      l->share[s] = new_storage[li];
      l->mirror[s] = new_mirror[li];
      ++li;
    }
  }
  for (Layout* l : layouts) l->permuted = true;
}

void unpermute(SimNet& net, const PermTriple& perms, std::initializer_list<Layout*> layouts,
               RandomSource& rng) {
  std::size_t n = perms.n;
  for (Layout* l : layouts) {
    if (l->n != n) throw std::invalid_argument("unpermute length mismatch");
    if (!l->permuted) throw ProtocolError("layout not permuted");
  }
  RandomSource mask_stream = rng.stream(RandomSource::kMaskStream);

  std::vector<SimNet::ArrayHandle> new_storage(layouts.size());
  for (int b = 0; b < 3; ++b) {
    int s = (b + 1) % 3;
    std::size_t li = 0;
    for (Layout* l : layouts) new_storage[li++] = net.alloc(s, "up.out", n, l->width);
    RandomSource mrng = mask_stream;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t src = static_cast<std::size_t>(read_perm(net, perms, s, j));
      li = 0;
      for (Layout* l : layouts) {
        Block v = net.read_block(l->mirror[s], src);
        v.xor_with(mask_share(mrng, l->width, s));
        net.write_block(new_storage[li], j, v);
        ++li;
      }
    }
    li = 0;
    for (Layout* l : layouts) {
      net.free_array(l->share[s]);
      net.free_array(l->mirror[s]);
      l->share[s] = new_storage[li];
      l->mirror[s] = SimNet::ArrayHandle{};
      ++li;
    }
  }
  for (Layout* l : layouts) l->permuted = false;
}

}  // namespace oram3
