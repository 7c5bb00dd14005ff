#pragma once

#include <optional>

#include "obliv.hpp"

namespace oram3 {

/// A batch-built structure answering up to n position-addressed lookups, each
/// touching every physical slot at most once, then drained wholesale.
///
/// Built over 2n slots: the n input entries followed by n special dummies
/// that feed one dummy lookup each. Entries and per-slot links are jointly
/// permuted; the head of the dummy chain is kept secret-shared (`dpos`) and
/// re-shared after every lookup so servers cannot tell dummy lookups (which
/// advance it) from real ones (which do not).
struct OtmState {
  std::size_t n = 0;
  std::size_t lookups_done = 0;
  bool alive = false;
  Layout data;      // permuted, 2n entries, read-once guarded storage
  Layout links;     // permuted, 2n links
  PermTriple perms; // over [2n]
  Layout dpos;      // length 1: position tuple of the next unused dummy
};

struct OtmBuild {
  OtmState st;
  /// Key/position rows, index-aligned with the build input: row i holds the
  /// input's key at i (absent for dummies) and the permuted position tuple of
  /// slot i. Callers feed these to the parent as fresh position labels.
  Layout keymap;
};

/// Consumes a sorted input layout (reals first by key, then dummies) of
/// length n >= 1 with distinct real keys.
OtmBuild otm_build(SimNet& net, Layout&& input, const Widths& w, RandomSource& rng);

/// One lookup. Real: pass the key and its position tuple. Dummy: pass neither.
/// Exactly 12 metered blocks either way. Throws ProtocolError after n lookups
/// or if any physical slot would be read twice (non-recurrence guard).
Block otm_lookup(SimNet& net, OtmState& st, const std::optional<std::uint64_t>& key,
                 const std::optional<PositionTuple>& pos, RandomSource& rng);

/// Drains the structure: unpermutes entries (and links, which are discarded)
/// and returns the first n slots, i.e. exactly the build input's content.
/// The state is destroyed.
Layout otm_getall(SimNet& net, OtmState& st, RandomSource& rng);

void free_otm(SimNet& net, OtmState& st);

}  // namespace oram3
