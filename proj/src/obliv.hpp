#pragma once

#include "perm.hpp"

namespace oram3 {

struct CompactResult {
  Layout out;
  std::size_t real_count = 0;
};

/// Stable oblivious compaction: reals keep their order and move to the front,
/// dummies fill the back. Linear bandwidth; the input layout is consumed.
///
/// Shape: permutation generation over [n], one reverse scan writing a hidden
/// linked list, a joint permute of (entries, links), then an n-step pointer
/// chase whose per-step events are constant. Physical indices touched during
/// the chase are images under permutations unknown to the storage servers.
CompactResult stable_compact(SimNet& net, Layout&& in, std::size_t link_width,
                             RandomSource& rng);

struct MergeResult {
  Layout out;
  std::size_t real_count = 0;
};

/// Merges two semi-sorted layouts of equal length n into one sorted layout of
/// length 2n. Ties between equal keys keep a's element first, so cascades
/// that feed fresher data through `a` dedup by recency downstream. Inputs are
/// consumed. Linear bandwidth; the traversal prefetches two elements and then
/// strictly alternates write-one/read-one so the event pattern never reveals
/// where either input's real run ends.
MergeResult merge(SimNet& net, Layout&& a, Layout&& b, std::size_t link_width,
                  RandomSource& rng);

/// Truncates a plain layout to its first n entries (bookkeeping only).
void truncate_layout(SimNet& net, Layout& l, std::size_t n);

}  // namespace oram3
