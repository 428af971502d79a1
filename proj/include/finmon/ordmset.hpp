#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace finmon {

// A finite multiset of subspace ids: (id, multiplicity) entries with ids
// strictly descending and multiplicities >= 1. The empty list is the empty
// multiset. Ids are arbitrary-precision: factoring a large subspace can
// produce astronomically large prime ids.
struct Multiset {
  std::vector<std::pair<mpz_class, uint64_t>> entries;

  static Multiset single(const mpz_class& id, uint64_t mult = 1);
  bool empty() const { return entries.empty(); }
  bool operator==(const Multiset&) const = default;
};

// An ordinal below omega^omega^omega in Cantor normal form:
// omega^{a1}*c1 + ... + omega^{ak}*ck with a1 > ... > ak, all ci >= 1.
// The zero ordinal is the empty term list.
struct CnfOrdinal {
  std::vector<std::pair<mpz_class, uint64_t>> terms;  // (exponent, coefficient)
  bool operator==(const CnfOrdinal&) const = default;
};

// The colexicographic ordinal key: entries of A read as CNF terms
// (exponent = id, coefficient = multiplicity). Injective on multisets.
CnfOrdinal phi(const Multiset& a);

// Standard CNF order: lexicographic on the term lists by (exponent,
// coefficient). Returns -1 / 0 / +1.
int cnf_compare(const CnfOrdinal& a, const CnfOrdinal& b);

// Grading: total number of elements, multiplicities counted.
uint64_t v(const Multiset& a);

// Schedule grade: sum of (id + 1) * multiplicity. Finitely many multisets
// share a grade, so (grade, phi) orders all candidates in order type omega.
mpz_class grade(const Multiset& a);

Multiset disjoint_union(const Multiset& a, const Multiset& b);

// True iff a is a submultiset of b (entrywise multiplicity <=).
bool submultiset(const Multiset& a, const Multiset& b);

// All B strictly contained in A with v(B) >= 2, sorted by phi ascending.
std::vector<Multiset> proper_submultisets_v2(const Multiset& a);

// Streaming iterator over the schedule: all multisets with v >= 2, ordered
// by (grade ascending, phi ascending). Equivalently: integer partitions of
// each grade into >= 2 parts (part = id + 1), generated directly in phi
// order without materializing a grade block.
class ScheduleCursor {
 public:
  ScheduleCursor();  // positioned at index 0 = {0^2}

  uint64_t index() const { return k_; }
  const Multiset& current() const { return cur_; }
  void advance();

 private:
  struct Frame {
    uint64_t g;     // remaining grade at this level
    uint64_t maxp;  // parts at this level are <= maxp
    uint64_t m, c;  // chosen part and multiplicity (m <= maxp, c*m <= g)
  };
  bool step_partition();  // next partition of grade_ in phi order
  void first_partition();
  void rebuild_current();

  uint64_t k_ = 0;
  uint64_t grade_ = 2;
  std::vector<Frame> stack_;
  Multiset cur_;
};

// The k-th schedule entry (a fresh cursor advanced k times).
Multiset schedule_candidate(uint64_t k);

// Textual form `{id^mult, ...}` with `^1` omitted, ids descending;
// the empty multiset is `{}`.
std::string format_multiset(const Multiset& a);
Multiset parse_multiset(const std::string& text);  // throws std::invalid_argument

}  // namespace finmon
