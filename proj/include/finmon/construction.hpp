#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "finmon/enumeration.hpp"
#include "finmon/ordmset.hpp"
#include "finmon/subspace.hpp"

namespace finmon {

enum class Classify { Zero, P, Q };

// One schedule step of the greedy construction of g.
struct StepRecord {
  uint64_t index = 0;
  Multiset candidate;
  bool processed = false;
  Subspace w;          // chosen subspace (processed steps only)
  Subspace watermark;  // watermark subspace after the step (zero = none yet)
};

struct ConstructionStats {
  uint64_t steps = 0;
  uint64_t processed = 0;
  uint64_t skipped = 0;
  uint32_t max_dim = 0;
  uint32_t max_amb = 0;
  uint64_t dense_rows_stored = 0;
  uint64_t unit_rows_stored = 0;
};

// The incremental construction of the partial bijection g: multisets of
// prime ids -> composite subspaces, processed along the (grade, phi)
// schedule. Holds the enumeration stream, the domain/image maps, the
// watermark, and a bounded log of step records.
//
// Internally subspaces are keyed by content (canonical rows / 128-bit
// hashes) and by position order; integer ids are only computed on demand
// (they grow astronomically with the watermark).
//
// Single-writer: mutating calls (step, classify, f_apply, star, ...) must
// be serialized by the caller; const accessors may run concurrently
// between mutations.
class ConstructionState {
 public:
  explicit ConstructionState(const FieldPrime& f, uint64_t log_limit = 20000,
                             std::string cache_dir = {});

  const FieldPrime& field() const { return f_; }
  Enumeration& enumeration() { return enum_; }
  const Enumeration& enumeration() const { return enum_; }

  uint64_t cursor() const { return stats_.steps; }
  const Multiset& current_candidate() const { return sched_.current(); }
  const Subspace& watermark() const { return wm_; }  // zero subspace = none yet
  const ConstructionStats& stats() const { return stats_; }
  const std::vector<StepRecord>& log() const { return log_; }

  // One schedule step: fetch the current candidate, skip it if any of its
  // elements is already composite, otherwise raise the watermark past the
  // candidate's ids, span the required lower bound W', choose the least
  // admissible W after the watermark, and record dom/image.
  void step();

  // The least subspace after the current watermark that contains
  // lower_bound (the deterministic replacement for the paper's arbitrary
  // admissible W). Does not mutate the state.
  Subspace choose_w(const Subspace& lower_bound) const;

  Classify classify(const Subspace& u);        // advances until watermark >= u
  Multiset f_inverse(const Subspace& u);       // factorization into prime ids
  Subspace f_apply(const Multiset& a);         // throws if an id of a is composite
  Subspace star(const Subspace& f, const Subspace& g);
  Multiset factor(const Subspace& u) { return f_inverse(u); }

  // Replace the stored value of an existing dom entry (fault injection for
  // the verification harness; breaks the construction invariants on purpose).
  // Throws if the multiset is not in dom.
  void overwrite_dom_value(const Multiset& a, const Subspace& w);

  // Lookup helpers (no advancement; mainly for tests and the CLI).
  std::optional<Subspace> dom_lookup(const Multiset& a) const;
  std::optional<Multiset> image_lookup(const Subspace& w) const;
  bool id_is_composite_so_far(const mpz_class& id) const;

 private:
  struct DomEntry {
    uint32_t amb = 0;
    uint32_t dim = 0;
    uint64_t unit_off = 0;   // into word_pool_: (amb+63)/64 words, bit c = unit row e_c
    uint64_t dense_off = 0;  // into word_pool_: n_dense rows of RowLayout(f_, amb).words
    uint32_t n_dense = 0;
    uint64_t key_off = 0;  // into key_pool_: packed candidate multiset
    uint32_t key_len = 0;
  };

  uint64_t pack_key(const Multiset& a);  // appends to key_pool_, returns offset
  static std::string packed_key(const Multiset& a);
  Multiset unpack_key(uint64_t off, uint32_t len) const;
  uint32_t store_entry(const Multiset& a, const Subspace& w);
  Subspace entry_subspace(const DomEntry& e) const;
  std::optional<uint32_t> find_dom(const Multiset& a) const;
  // dom entry of a with one copy of entry `drop` removed (no multiset copy)
  std::optional<uint32_t> find_dom_less(const Multiset& a, size_t drop) const;
  std::optional<uint32_t> find_packed() const;  // probes key_scratch_
  const Subspace& element_subspace(const mpz_class& id);  // small-id fast path
  Subspace lower_bound_span(const Multiset& a);           // W'

  FieldPrime f_;
  Enumeration enum_;
  ScheduleCursor sched_;
  Subspace wm_;  // zero subspace while watermark = -1
  uint64_t log_limit_;
  std::vector<StepRecord> log_;
  ConstructionStats stats_;

  // dom: open-addressing table, hash of packed multiset -> entry index
  // (matches are verified against the key bytes)
  void dom_insert(uint64_t h, uint32_t idx);
  void dom_grow();
  std::vector<uint64_t> dom_hash_;
  std::vector<uint32_t> dom_slot_;  // entry index, or kEmptySlot
  size_t dom_used_ = 0;
  // image: 128-bit subspace hash -> entry index
  std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, uint32_t>>> image_;
  std::unordered_set<uint64_t> image_small_ids_;  // image ids inside the stream table
  std::vector<DomEntry> entries_;
  mutable std::vector<uint8_t> key_scratch_;  // reused lookup key buffer
  std::vector<uint64_t> word_pool_;
  std::vector<uint8_t> key_pool_;
  Subspace scratch_elem_;  // cache for element_subspace beyond the stream table
  mpz_class scratch_elem_id_ = -1;
};

// The Theorem A product monoid: subspaces paired with a dyadic exponent;
// the operation stars the subspaces and adds the exponents.
std::pair<Subspace, uint64_t> theorem_a_op(ConstructionState& state,
                                           const std::pair<Subspace, uint64_t>& x,
                                           const std::pair<Subspace, uint64_t>& y);

}  // namespace finmon
