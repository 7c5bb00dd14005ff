#pragma once

#include <cstdint>

#include "codec.hpp"
#include "rng.hpp"
#include "simnet.hpp"

namespace oram3 {

/// Three XOR shares of one block: s[0] ^ s[1] ^ s[2] == value.
struct ShareTriple {
  Block s[3];
};

ShareTriple split3(const Block& value, RandomSource& rng);
Block reconstruct3(const ShareTriple& t);

/// Client-side handle for an array secret-shared across the three servers.
/// Share b's storage copy lives on server b. While a layout is permuted,
/// server b additionally holds share b+1 (the copy it permuted) plus the
/// permutation it applied; plain layouts carry storage copies only.
struct Layout {
  std::size_t n = 0;
  std::size_t width = 0;
  SimNet::ArrayHandle share[3];
  bool permuted = false;
  SimNet::ArrayHandle mirror[3];  // mirror[s]: share s held by server s-1; valid while permuted

  bool valid() const { return share[0].valid(); }
};

/// Allocates a zero-content layout (all shares zero blocks).
Layout alloc_layout(SimNet& net, std::string_view role, std::size_t n, std::size_t width,
                    bool read_once_guard = false);

void free_layout(SimNet& net, Layout& l);

/// Replaces index i with a fresh splitting of `value`: one block written to
/// each server.
void secret_write(SimNet& net, Layout& l, std::size_t i, const Block& value, RandomSource& rng);

/// Reads share b of index i from server b only (never from a mirror) and
/// XORs: exactly three block reads.
Block reconstruct_at(SimNet& net, const Layout& l, std::size_t i);

/// Same, with a per-server index (how permuted structures are addressed).
Block reconstruct_tuple(SimNet& net, const Layout& l, const PositionTuple& t);

// ---- test-only helpers (unmetered) ----

/// Abstract content of a plain (unpermuted) layout via share XOR.
Block peek_abstract(const SimNet& net, const Layout& l, std::size_t i);

}  // namespace oram3
