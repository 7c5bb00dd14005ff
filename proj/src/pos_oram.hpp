#pragma once

#include <vector>

#include "otm.hpp"

namespace oram3 {

/// One depth of the recursive structure: a hierarchy of one-time memories at
/// levels 0..d (level j holds 2^j slots) plus a one-slot staging structure
/// rebuilt on every access from the entry the fetch phase pulled out. Which
/// levels are occupied follows a public binary-counter schedule, so presence
/// checks leak nothing.
struct PosOram {
  int d = 0;
  std::size_t entry_width = 0;
  Widths w;
  std::vector<OtmState> levels;  // levels[j].alive == occupied
  OtmState staging;
};

PosOram make_pos_oram(int d, std::size_t entry_width, const Widths& w);
void free_pos_oram(SimNet& net, PosOram& p);

inline bool pos_level_full(const PosOram& p, int j) { return p.levels[static_cast<std::size_t>(j)].alive; }

/// Fetch-phase probe: one lookup against every occupied level, real at the
/// labeled one and dummy elsewhere. Returns the entry found there.
Block pos_lookup(SimNet& net, PosOram& p, std::uint64_t key, const codec::ChildLabel& label,
                 RandomSource& rng);

/// Rebuilds the one-slot staging structure around the (possibly modified)
/// entry the current access fetched; its key/position rows are discarded
/// because staging is drained before anyone could use them.
void place_fetched(SimNet& net, PosOram& p, const Block& entry, RandomSource& rng);

/// Maintain-phase rebuild into level l: drains staging and levels 0..l-1
/// (plus level l itself when l == d), dedups by recency, folds in the update
/// batch, and installs the result as the new level l. Returns the key/position
/// rows of the rebuilt level for the parent depth to absorb.
Layout pos_shuffle(SimNet& net, PosOram& p, Layout&& update, int l, RandomSource& rng);

/// Rewrites every entry, turning the later copy of any adjacent equal-key
/// pair into a dummy. With merges arranged so fresher copies sort earlier,
/// this keeps exactly the newest version of each key.
void mark_duplicates(SimNet& net, Layout& l, RandomSource& rng);

/// One-step-delayed rewrite pass over a merged (stored, update) layout:
/// wherever an update row (second of an adjacent equal-key pair) carries an
/// assigned child slot, it overwrites that slot of the stored row and then
/// becomes a dummy.
void scan_update(SimNet& net, Layout& l, RandomSource& rng);

}  // namespace oram3
