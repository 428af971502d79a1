#pragma once

#include <map>
#include <string>

#include "finmon/construction.hpp"

namespace finmon {

// A formal difference s - t of monoid elements, both in factored form.
struct MonoidPair {
  Multiset s;
  Multiset t;
};

// Normal form of a Grothendieck group element: prime id -> nonzero integer
// exponent, keyed ascending so iteration matches the textual form.
struct GrothElem {
  std::map<mpz_class, long> exponents;

  bool is_zero() const { return exponents.empty(); }
  bool operator==(const GrothElem&) const = default;
};

// (s1, t1) ~ (s2, t2)  iff  s1 + t2 = t1 + s2 (as multisets).
bool pair_equiv(const MonoidPair& a, const MonoidPair& b);

// Exponents of a.s minus exponents of a.t, zeros dropped. Every id must
// classify as P (factor composite subspaces first); throws otherwise.
GrothElem normalize(const MonoidPair& a, ConstructionState& st);

GrothElem g_add(const GrothElem& x, const GrothElem& y);
GrothElem g_neg(const GrothElem& x);

// The canonical embedding of the monoid: F -> normalize((factor(F), 0)).
GrothElem embed(const Subspace& f, ConstructionState& st);

// "+2·[id0] −1·[id7]" with keys ascending; "0" for the identity.
std::string format_groth(const GrothElem& x);

}  // namespace finmon
