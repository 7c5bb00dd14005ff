#include <set>

#include "doctest.h"
#include "errors.hpp"
#include "otm.hpp"
#include "test_util.hpp"

using namespace oram3;
using namespace testutil;

namespace {

struct Built {
  SimNet net;
  RandomSource rng{0};
  OtmBuild b;
  std::vector<PositionTuple> tuples;
};

/// Build over the given entries and capture the keymap's position tuples.
void build_over(Built& bt, const std::vector<refmodel::Entry>& es, std::uint64_t seed) {
  bt.rng = RandomSource(seed);
  Layout in = make_entries(bt.net, "in", es, 16, bt.rng);
  bt.b = otm_build(bt.net, std::move(in), Widths::fixed(), bt.rng);
  bt.tuples.resize(es.size());
  for (std::size_t i = 0; i < es.size(); ++i)
    bt.tuples[i] = codec::keypos_tuple(peek_abstract(bt.net, bt.b.keymap, i));
}

void teardown(Built& bt) {
  free_otm(bt.net, bt.b.st);
  free_layout(bt.net, bt.b.keymap);
  CHECK(bt.net.live_arrays() == 0);
}

}  // namespace

TEST_CASE("single-entry structure answers its one key") {
  Built bt;
  build_over(bt, {refmodel::R(5, 7)}, 21);
  Block e = otm_lookup(bt.net, bt.b.st, 5, bt.tuples[0], bt.rng);
  CHECK(codec::is_real(e));
  CHECK(codec::key(e) == 5);
  CHECK(codec::payload_u64(e) == 7);
  teardown(bt);
}

TEST_CASE("dummy lookups walk the reserve chain in order") {
  Built bt;
  build_over(bt, {refmodel::Dm(), refmodel::Dm()}, 22);
  Block d1 = otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
  CHECK(codec::tag(d1) == codec::kTagSpecialDummy);
  CHECK(codec::key(d1) == 1);
  Block d2 = otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
  CHECK(codec::tag(d2) == codec::kTagSpecialDummy);
  CHECK(codec::key(d2) == 2);
  teardown(bt);
}

TEST_CASE("keymap mirrors the input rows") {
  Built bt;
  std::vector<refmodel::Entry> es = {refmodel::R(3, 1), refmodel::R(8, 2), refmodel::Dm(),
                                     refmodel::Dm()};
  build_over(bt, es, 23);
  CHECK(bt.b.keymap.n == es.size());
  std::set<std::uint32_t> per_server[3];
  for (std::size_t i = 0; i < es.size(); ++i) {
    Block row = peek_abstract(bt.net, bt.b.keymap, i);
    CHECK(codec::is_real(row) == es[i].real);
    if (es[i].real) CHECK(codec::key(row) == es[i].key);
    for (int s = 0; s < 3; ++s) {
      CHECK(bt.tuples[i].p[s] < 2 * es.size());
      per_server[s].insert(bt.tuples[i].p[s]);
    }
  }
  for (int s = 0; s < 3; ++s) CHECK(per_server[s].size() == es.size());  // injective
  teardown(bt);
}

TEST_CASE("drain returns exactly the build input") {
  RandomSource wl(24);
  for (int round = 0; round < 8; ++round) {
    Built bt;
    std::size_t n = 1 + wl.below(16);
    auto es = random_entries(n, wl, true, 0);
    build_over(bt, es, 2400 + static_cast<std::uint64_t>(round));
    Layout back = otm_getall(bt.net, bt.b.st, bt.rng);
    CHECK(back.n == n);
    CHECK(refmodel::same(peek_entries(bt.net, back), es));
    free_layout(bt.net, back);
    free_layout(bt.net, bt.b.keymap);
    CHECK(bt.net.live_arrays() == 0);
  }
}

TEST_CASE("drain is unchanged by a full round of lookups") {
  Built bt;
  std::vector<refmodel::Entry> es = {refmodel::R(2, 20), refmodel::R(4, 40), refmodel::Dm(),
                                     refmodel::Dm()};
  build_over(bt, es, 25);
  CHECK(codec::payload_u64(otm_lookup(bt.net, bt.b.st, 4, bt.tuples[1], bt.rng)) == 40);
  otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
  CHECK(codec::payload_u64(otm_lookup(bt.net, bt.b.st, 2, bt.tuples[0], bt.rng)) == 20);
  otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);

  Layout back = otm_getall(bt.net, bt.b.st, bt.rng);
  CHECK(refmodel::same(peek_entries(bt.net, back), es));
  free_layout(bt.net, back);
  free_layout(bt.net, bt.b.keymap);
}

TEST_CASE("every key of a full structure is retrievable in any order") {
  Built bt;
  std::vector<refmodel::Entry> es;
  for (std::uint64_t k = 0; k < 8; ++k) es.push_back(refmodel::R(2 * k, 100 + k));
  build_over(bt, es, 26);
  std::size_t order[8] = {5, 2, 7, 0, 3, 6, 1, 4};
  for (std::size_t i : order) {
    Block e = otm_lookup(bt.net, bt.b.st, 2 * i, bt.tuples[i], bt.rng);
    CHECK(codec::payload_u64(e) == 100 + i);
  }
  teardown(bt);
}

TEST_CASE("lookup moves exactly twelve blocks") {
  Built bt;
  build_over(bt, {refmodel::R(1, 1), refmodel::Dm()}, 27);
  bt.net.reset_meter();
  otm_lookup(bt.net, bt.b.st, 1, bt.tuples[0], bt.rng);
  CHECK(bt.net.meter().blocks == 12);
  bt.net.reset_meter();
  otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
  CHECK(bt.net.meter().blocks == 12);
  teardown(bt);
}

TEST_CASE("real and dummy lookups have identical wire skeletons") {
  auto capture = [](bool real) {
    Built bt;
    build_over(bt, {refmodel::R(6, 1), refmodel::Dm()}, 28);
    SkeletonSink sk(bt.net);
    bt.net.set_sink(&sk);
    if (real)
      otm_lookup(bt.net, bt.b.st, 6, bt.tuples[0], bt.rng);
    else
      otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
    bt.net.set_sink(nullptr);
    teardown(bt);
    return sk.bytes();
  };
  std::string real_sk = capture(true);
  CHECK(real_sk == capture(false));
  CHECK_FALSE(real_sk.empty());
}

TEST_CASE("capacity is enforced") {
  Built bt;
  build_over(bt, {refmodel::R(1, 1), refmodel::Dm()}, 29);
  otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng);
  otm_lookup(bt.net, bt.b.st, 1, bt.tuples[0], bt.rng);
  CHECK_THROWS_AS(otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng), ProtocolError);
  teardown(bt);
}

TEST_CASE("repeating a position trips the non-recurrence guard") {
  Built bt;
  build_over(bt, {refmodel::R(1, 1), refmodel::R(2, 2)}, 30);
  otm_lookup(bt.net, bt.b.st, 1, bt.tuples[0], bt.rng);
  CHECK_THROWS_AS(otm_lookup(bt.net, bt.b.st, 1, bt.tuples[0], bt.rng), ProtocolError);
  teardown(bt);
}

TEST_CASE("drained structures reject further use") {
  Built bt;
  build_over(bt, {refmodel::R(1, 1)}, 31);
  Layout back = otm_getall(bt.net, bt.b.st, bt.rng);
  CHECK_THROWS_AS(otm_lookup(bt.net, bt.b.st, std::nullopt, std::nullopt, bt.rng), ProtocolError);
  CHECK_THROWS_AS(otm_getall(bt.net, bt.b.st, bt.rng), ProtocolError);
  free_layout(bt.net, back);
  free_layout(bt.net, bt.b.keymap);
}

TEST_CASE("build rejects bad inputs") {
  SimNet net;
  RandomSource rng(32);
  Layout empty = alloc_layout(net, "e", 0, 16);
  CHECK_THROWS_AS(otm_build(net, std::move(empty), Widths::fixed(), rng),
                  std::invalid_argument);

  Layout l = make_entries(net, "p", {refmodel::R(1), refmodel::Dm()}, 16, rng);
  PermTriple t = gen_perm_triple(net, 2, 16, rng);
  permute(net, t, {&l}, rng);
  CHECK_THROWS_AS(otm_build(net, std::move(l), Widths::fixed(), rng), ProtocolError);
}

TEST_CASE("mismatched lookup arguments are rejected") {
  Built bt;
  build_over(bt, {refmodel::R(1, 1)}, 33);
  CHECK_THROWS_AS(otm_lookup(bt.net, bt.b.st, 1, std::nullopt, bt.rng), std::invalid_argument);
  CHECK_THROWS_AS(otm_lookup(bt.net, bt.b.st, std::nullopt, bt.tuples[0], bt.rng),
                  std::invalid_argument);
  teardown(bt);
}
