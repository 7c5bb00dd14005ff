#pragma once

#include <initializer_list>
#include <optional>

#include "layout.hpp"

namespace oram3 {

/// A uniformly random permutation held in the clear by one server, written
/// there by the client. Entry i is an index block holding pi(i), the position
/// element i moves to.
struct StoredPermutation {
  int server = -1;
  std::size_t n = 0;
  SimNet::ArrayHandle arr;
};

/// Client-driven inside-out Fisher-Yates directly against the server-resident
/// array: three metered blocks per element, pattern a function of n only.
StoredPermutation gen_random_perm(SimNet& net, int server, std::size_t n, std::size_t width,
                                  RandomSource& rng);

/// One permutation per share. perm[s] is applied to share s and lives on
/// server s-1 (the server that never stores share s), so applying it reveals
/// nothing about where a storage server's own blocks went.
struct PermTriple {
  std::size_t n = 0;
  StoredPermutation perm[3];
};

PermTriple gen_perm_triple(SimNet& net, std::size_t n, std::size_t width, RandomSource& rng);
void free_perm_triple(SimNet& net, PermTriple& t);

std::uint64_t read_perm(SimNet& net, const PermTriple& t, int share, std::size_t i);

/// Applies the triple to parallel layouts of length n in one joint pass.
/// Every share is remasked with a fresh zero-sum triple per index while it
/// passes through its permuting server, so the three output shares are
/// jointly fresh; each permuting server keeps the copy it produced (the
/// mirror) and the client forwards the same blocks to the storage server.
/// Storage copies of the outputs carry the read-once guard.
void permute(SimNet& net, const PermTriple& perms, std::initializer_list<Layout*> layouts,
             RandomSource& rng);

/// Inverse pass: reads each mirror through its permutation, remasks with a
/// fresh zero-sum triple, and lands plain (identity-order) layouts back on
/// the storage servers. Mirrors are consumed.
void unpermute(SimNet& net, const PermTriple& perms, std::initializer_list<Layout*> layouts,
               RandomSource& rng);

}  // namespace oram3
