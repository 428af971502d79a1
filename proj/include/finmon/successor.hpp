#pragma once

#include "finmon/subspace.hpp"

namespace finmon {

// The least subspace (theta order: ambient, dim, row-serial-seq lex) that
// contains `w` and lies strictly after `bound`; bound == nullptr means no
// lower bound (the least superspace overall). `w` may be the zero subspace.
//
// Implemented as a direct search over sections (ambient, dim): rows are
// fixed greedily in pivot order, each chosen minimal in serial order subject
// to an exact feasibility test on the residual constraints (the rows of `w`
// reduced modulo the fixed rows). Validated against brute-force enumeration
// in the tests.
Subspace least_superspace_after(const Subspace& w, const Subspace* bound);

}  // namespace finmon
