#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "finmon/subspace.hpp"

namespace finmon {

// Gaussian binomial [n choose k]_p: number of k-dim subspaces of GF(p)^n.
mpz_class gauss_binom(uint32_t n, uint32_t k, uint32_t p);
// Galois number: total number of subspaces of GF(p)^n (zero space included).
mpz_class galois_number(uint32_t n, uint32_t p);

// The computable well-ordering theta of all nonzero finite-dimensional
// subspaces: ambient bound ascending, then dimension ascending, then
// lexicographic on the row-serial sequence (rows in pivot order).
//
// Ids are realized two ways, cross-checked against each other:
//  - a streaming table of the blocks New(n) while they stay small (also the
//    oracle for everything else), and
//  - closed-form counting of lexicographically smaller RREF matrices
//    (column DP with exact big-integer arithmetic) for arbitrary size.
class Enumeration {
 public:
  explicit Enumeration(const FieldPrime& f, uint64_t stream_limit = (1u << 20),
                       std::string cache_dir = {});

  const FieldPrime& field() const { return f_; }

  mpz_class rank(const Subspace& u) const;
  Subspace unrank(const mpz_class& id) const;
  std::vector<mpz_class> block_sizes(uint32_t up_to_n) const;

  // Streaming table access for small ids (used by the construction engine).
  const Subspace& at(uint64_t id) const;
  std::optional<uint64_t> stream_index(const Subspace& u) const;
  // Largest n such that all blocks New(1..n) fit under the stream limit.
  uint32_t stream_block_limit() const;
  // Number of ids covered by the streaming table (blocks 1..stream_block_limit).
  uint64_t stream_capacity() const;

  // Independent code paths, exposed for differential testing.
  mpz_class rank_closed_form(const Subspace& u) const;
  Subspace unrank_closed_form(const mpz_class& id) const;

 private:
  void ensure_block(uint32_t n) const;  // caller holds mu_
  void build_block(uint32_t n) const;
  bool load_block_cache(uint32_t n, std::vector<Subspace>& out) const;
  void store_block_cache(uint32_t n, const std::vector<Subspace>& blk) const;

  FieldPrime f_;
  uint64_t stream_limit_;
  std::string cache_dir_;
  mutable std::mutex mu_;
  // Concatenated blocks 1..blocks_built_. Deque: at() hands out references
  // that must survive later block growth.
  mutable std::deque<Subspace> table_;
  mutable std::unordered_map<uint64_t, std::vector<uint64_t>> index_;  // hash -> ids
  mutable uint32_t blocks_built_ = 0;
};

}  // namespace finmon
