#include <set>

#include "doctest.h"
#include "errors.hpp"
#include "harness.hpp"
#include "test_util.hpp"

using namespace oram3;
using namespace testutil;

TEST_CASE("generated permutation is a bijection at fixed cost") {
  SimNet net;
  RandomSource rng(11);
  const std::size_t n = 16;
  net.reset_meter();
  StoredPermutation p = gen_random_perm(net, 0, n, 16, rng);
  CHECK(net.meter().blocks == 3 * n);

  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = codec::index_value(net.peek(p.arr, i));
    CHECK(v < n);
    seen.insert(v);
  }
  CHECK(seen.size() == n);
}

TEST_CASE("triple places each permutation off its share's storage server") {
  SimNet net;
  RandomSource rng(12);
  PermTriple t = gen_perm_triple(net, 8, 16, rng);
  for (int s = 0; s < 3; ++s) {
    CHECK(t.perm[s].server == (s + 2) % 3);  // never server s itself
    CHECK(t.perm[s].n == 8);
  }
  free_perm_triple(net, t);
  CHECK(net.live_arrays() == 0);
}

TEST_CASE("first images are uniform; constant rng is not") {
  const std::size_t n = 8;
  const int trials = 800;
  std::vector<std::uint64_t> counts(n, 0);
  for (int t = 0; t < trials; ++t) {
    SimNet net;
    RandomSource rng(1000 + static_cast<std::uint64_t>(t));
    StoredPermutation p = gen_random_perm(net, 0, n, 16, rng);
    counts[codec::index_value(net.peek(p.arr, 0))] += 1;
  }
  CHECK(harness::chi_square_uniform_p(counts) > 0.001);

  std::vector<std::uint64_t> rigged(n, 0);
  for (int t = 0; t < trials; ++t) {
    SimNet net;
    RandomSource rng(1000 + static_cast<std::uint64_t>(t), RandomSource::Mode::constant);
    StoredPermutation p = gen_random_perm(net, 0, n, 16, rng);
    rigged[codec::index_value(net.peek(p.arr, 0))] += 1;
  }
  CHECK(harness::chi_square_uniform_p(rigged) < 0.001);
}

TEST_CASE("permute relocates values to the tuple positions") {
  SimNet net;
  RandomSource rng(13);
  const std::size_t n = 8;
  std::vector<refmodel::Entry> es;
  for (std::size_t i = 0; i < n; ++i) es.push_back(refmodel::R(i, 100 + i));
  Layout l = make_entries(net, "in", es, 16, rng);

  PermTriple t = gen_perm_triple(net, n, 16, rng);
  permute(net, t, {&l}, rng);
  CHECK(l.permuted);
  for (int s = 0; s < 3; ++s) CHECK(l.mirror[s].valid());

  for (std::size_t i = 0; i < n; ++i) {
    PositionTuple pos;
    for (int s = 0; s < 3; ++s)
      pos.p[s] = static_cast<std::uint32_t>(read_perm(net, t, s, i));
    Block v = reconstruct_tuple(net, l, pos);
    CHECK(entry_of(v).key == i);
    CHECK(entry_of(v).payload == 100 + i);
  }
  free_perm_triple(net, t);
  free_layout(net, l);
}

TEST_CASE("permute then unpermute is the identity with fresh shares") {
  RandomSource wl(14);
  for (int round = 0; round < 10; ++round) {
    SimNet net;
    RandomSource rng(500 + static_cast<std::uint64_t>(round));
    std::size_t n = 1 + wl.below(16);
    auto es = random_entries(n, wl, false, 32);
    Layout l = make_entries(net, "io", es, 16, rng);
    Block share0_before = net.peek(l.share[0], 0);

    PermTriple t = gen_perm_triple(net, n, 16, rng);
    permute(net, t, {&l}, rng);
    unpermute(net, t, {&l}, rng);
    CHECK_FALSE(l.permuted);
    CHECK(refmodel::same(peek_entries(net, l), es));
    if (n >= 4) CHECK(net.peek(l.share[0], 0) != share0_before);

    free_perm_triple(net, t);
    free_layout(net, l );
    CHECK(net.live_arrays() == 0);
  }
}

TEST_CASE("joint permutation keeps parallel layouts aligned") {
  SimNet net;
  RandomSource rng(15);
  const std::size_t n = 6;
  std::vector<refmodel::Entry> a_es, b_es;
  for (std::size_t i = 0; i < n; ++i) {
    a_es.push_back(refmodel::R(i, 1));
    b_es.push_back(refmodel::R(i + 50, 2));
  }
  Layout a = make_entries(net, "a", a_es, 16, rng);
  Layout b = make_entries(net, "b", b_es, 16, rng);
  PermTriple t = gen_perm_triple(net, n, 16, rng);
  permute(net, t, {&a, &b}, rng);
  for (std::size_t i = 0; i < n; ++i) {
    PositionTuple pos;
    for (int s = 0; s < 3; ++s)
      pos.p[s] = static_cast<std::uint32_t>(read_perm(net, t, s, i));
    CHECK(entry_of(reconstruct_tuple(net, a, pos)).key == i);
    CHECK(entry_of(reconstruct_tuple(net, b, pos)).key == i + 50);
  }
  free_perm_triple(net, t);
  free_layout(net, a);
  free_layout(net, b);
}

TEST_CASE("permute state errors") {
  SimNet net;
  RandomSource rng(16);
  Layout l = make_entries(net, "l", {refmodel::R(1), refmodel::Dm()}, 16, rng);
  PermTriple t = gen_perm_triple(net, 2, 16, rng);
  CHECK_THROWS_AS(unpermute(net, t, {&l}, rng), ProtocolError);
  permute(net, t, {&l}, rng);
  CHECK_THROWS_AS(permute(net, t, {&l}, rng), ProtocolError);

  Layout wrong = alloc_layout(net, "w", 3, 16);
  CHECK_THROWS_AS(permute(net, t, {&wrong}, rng), std::invalid_argument);
}

namespace {

std::string permute_skeleton(std::uint64_t seed, std::uint64_t fill) {
  SimNet net;
  SkeletonSink sk(net);
  net.set_sink(&sk);
  RandomSource rng(seed);
  const std::size_t n = 8;
  Layout l = alloc_layout(net, "in", n, 16);
  for (std::size_t i = 0; i < n; ++i)
    secret_write(net, l, i, codec::real_entry(16, fill + i, fill), rng);
  PermTriple t = gen_perm_triple(net, n, 16, rng);
  permute(net, t, {&l}, rng);
  unpermute(net, t, {&l}, rng);
  return sk.bytes();
}

}  // namespace

TEST_CASE("wire skeleton is independent of seed and content") {
  std::string base = permute_skeleton(1, 0);
  CHECK(base == permute_skeleton(1, 999));
  CHECK(base == permute_skeleton(2, 0));
  CHECK(base == permute_skeleton(3, 777));
}
