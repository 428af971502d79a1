#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finmon/construction.hpp"

namespace finmon {

// Selectable law families for verify_axioms.
enum VerifyChecks : unsigned {
  kCheckComm = 1u << 0,
  kCheckAssoc = 1u << 1,
  kCheckCancel = 1u << 2,
  kCheckContain = 1u << 3,
  kCheckFactor = 1u << 4,
  kCheckGroth = 1u << 5,
  kCheckIdentity = 1u << 6,
  kCheckAll = (1u << 7) - 1,
};

struct VerifyFailure {
  std::string law;     // "commutativity", "associativity", ...
  std::string detail;  // counterexample description
};

struct VerifyReport {
  uint64_t pairs = 0;         // commutativity/containment pairs checked
  uint64_t triples = 0;       // associativity triples checked
  uint64_t cancel_pairs = 0;  // (F, G, H) cancellation comparisons
  uint64_t factor_cases = 0;  // factorization round trips
  uint64_t groth_cases = 0;   // embedding homomorphism/injectivity cases
  std::vector<VerifyFailure> failures;

  bool ok() const { return failures.empty(); }
};

// Exhaustively checks the monoid laws over {0} plus all subspaces with
// id < max_id: commutativity, identity, containment (F, G inside F*G),
// cancellativity (per shared H), factorization round trips, and the
// Grothendieck embedding. Associativity runs over all triples with
// id < assoc_max_id (the cubic part is budgeted separately). Failures are
// collected in the report, never thrown.
VerifyReport verify_axioms(ConstructionState& st, uint64_t max_id, uint64_t assoc_max_id,
                           unsigned checks = kCheckAll);

inline VerifyReport verify_axioms(ConstructionState& st, uint64_t max_id) {
  return verify_axioms(st, max_id, max_id, kCheckAll);
}

std::string format_report(const VerifyReport& r);

}  // namespace finmon
