#include "layout.hpp"

namespace oram3 {

ShareTriple split3(const Block& value, RandomSource& rng) {
  ShareTriple t;
  t.s[0] = Block::random(value.width(), rng);
  t.s[1] = Block::random(value.width(), rng);
  t.s[2] = value;
  t.s[2].xor_with(t.s[0]);
  t.s[2].xor_with(t.s[1]);
  return t;
}

Block reconstruct3(const ShareTriple& t) {
  Block v = t.s[0];
  v.xor_with(t.s[1]);
  v.xor_with(t.s[2]);
  return v;
}

Layout alloc_layout(SimNet& net, std::string_view role, std::size_t n, std::size_t width,
                    bool read_once_guard) {
  Layout l;
  l.n = n;
  l.width = width;
  std::string base(role);
  for (int b = 0; b < 3; ++b)
    l.share[b] = net.alloc(b, base, n, width, read_once_guard);
  return l;
}

void free_layout(SimNet& net, Layout& l) {
  for (int b = 0; b < 3; ++b) {
    if (l.share[b].valid()) net.free_array(l.share[b]);
    if (l.permuted && l.mirror[b].valid()) net.free_array(l.mirror[b]);
    l.share[b] = SimNet::ArrayHandle{};
    l.mirror[b] = SimNet::ArrayHandle{};
  }
  l.permuted = false;
  l.n = 0;
}

void secret_write(SimNet& net, Layout& l, std::size_t i, const Block& value, RandomSource& rng) {
  ShareTriple t = split3(value, rng);
  for (int b = 0; b < 3; ++b) net.write_block(l.share[b], i, t.s[b]);
}

Block reconstruct_at(SimNet& net, const Layout& l, std::size_t i) {
  Block v = net.read_block(l.share[0], i);
  v.xor_with(net.read_block(l.share[1], i));
  v.xor_with(net.read_block(l.share[2], i));
  return v;
}

Block reconstruct_tuple(SimNet& net, const Layout& l, const PositionTuple& t) {
  Block v = net.read_block(l.share[0], t.p[0]);
  v.xor_with(net.read_block(l.share[1], t.p[1]));
  v.xor_with(net.read_block(l.share[2], t.p[2]));
  return v;
}

Block peek_abstract(const SimNet& net, const Layout& l, std::size_t i) {
  Block v = net.peek(l.share[0], i);
  v.xor_with(net.peek(l.share[1], i));
  v.xor_with(net.peek(l.share[2], i));
  return v;
}

}  // namespace oram3
