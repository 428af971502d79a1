#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace finmon {

// Rank-k lattice monoid: the group Z^k or the positive cone N^k.
enum class LatticeKind { Zk, Nk };

struct LatticeGroup {
  LatticeKind kind = LatticeKind::Zk;
  uint32_t k = 1;  // rank, >= 1
};

using LatticePoint = std::vector<long>;

// A bounded R^d-valued function on a lattice with a declared sup bound.
// Evaluators must be pure; operator() checks arity, the domain cone, and
// that the observed value stays within the declared bound.
struct BoundedFn {
  LatticeGroup domain;
  uint32_t value_dim = 1;
  double sup_bound = 0.0;
  std::function<Eigen::VectorXd(const LatticePoint&)> evaluator;

  Eigen::VectorXd operator()(const LatticePoint& t) const;
};

// Constructors. Indices i are 1-based coordinates.
BoundedFn const_fn(LatticeGroup g, const Eigen::VectorXd& x);
BoundedFn point_indicator(LatticeGroup g, LatticePoint t0);
BoundedFn slab_indicator(LatticeGroup g, uint32_t i, long c);  // indicator of {t_i = c}
// Deterministic pseudo-random integer values in [-4, 4] on the cube
// |t|_inf <= support_radius, zero outside; value_dim 1, sup_bound 4.
BoundedFn random_fn(LatticeGroup g, uint64_t seed, long support_radius);
// "const:<x[,y,...]>", "point:<t1,...,tk>", "slab:i=<i>,c=<c>",
// "random:seed=<s>,support=<r>"; throws std::invalid_argument on bad syntax.
BoundedFn parse_fn(const std::string& desc, LatticeGroup g);

// Average of f over the centered cube [-n, n]^k (domain must be Z^k).
// Fixed pairwise-summation reduction for reproducibility.
Eigen::VectorXd folner_mean(const BoundedFn& f, long n);

enum class Side { left, right };

// f shifted by s: result(t) = f(t + s). The domains are abelian, so both
// sides coincide; the parameter is kept for API fidelity.
BoundedFn translate(const BoundedFn& f, const LatticePoint& s, Side side = Side::right);

// |folner_mean(translate(f, s), n) - folner_mean(f, n)| in the sup norm.
double invariance_defect(const BoundedFn& f, const LatticePoint& s, long n);
// The a-priori boundary estimate sup_bound * (1 - (2n+1-2|s|inf)^k/(2n+1)^k).
double defect_bound(const BoundedFn& f, const LatticePoint& s, long n);

// Lift along coordinatewise absolute value: f'(t) = f(|t|), N^k -> Z^k.
BoundedFn lift_abs(const BoundedFn& f);

// h restricted to the set where pred holds of coordinate i: value h(t) when
// pred(t_i), zero otherwise.
BoundedFn restrict_predicate(const BoundedFn& h, uint32_t i,
                             const std::function<bool(long)>& pred);

using RestrictOp =
    std::function<BoundedFn(const BoundedFn&, uint32_t, const std::function<bool(long)>&)>;

// Verifies, exactly on the cube [-n, n]^k, the four-term decomposition of
// f' = lift_abs(f), the two-term decomposition of (f shifted by e_i) lifted,
// and the translate matchings between their outer slabs. On failure returns
// false and, when witness is non-null, describes the failing point. The
// restriction operator may be substituted (fault injection in tests).
bool check_groth_decomposition(const BoundedFn& f, uint32_t i, long n,
                               std::string* witness = nullptr,
                               const RestrictOp& restrict_op = {});

// For f supported on the hyperplane {t_i = 0} (precondition checked on the
// cube, violation throws with a witness): true iff the translates of f by
// e_i, 2e_i, ..., m*e_i have pairwise disjoint supports within [-n, n]^k.
bool disjoint_support_translates(const BoundedFn& f, uint32_t i, long m, long n);

struct KernelBound {
  double measured = 0.0;
  double bound = 0.0;
};

// For f supported on the slab {t_i = c} (checked on the cube): measured is
// |folner_mean(f, n)| and bound is sup_bound/(2n+1); measured <= bound is
// asserted (it is an exact counting fact).
KernelBound kernel_mean_bound(const BoundedFn& f, uint32_t i, long c, long n);

// Extension of f from the finite-index sublattice H = m_1 Z x ... x m_k Z to
// Z^k: result(t) = f(t - g) where g is the coset representative of t. The
// default transversal is the fundamental box prod [0, m_j); a custom
// transversal may be supplied and is validated.
BoundedFn coset_extension(const BoundedFn& f, const std::vector<long>& moduli,
                          const std::vector<LatticePoint>& reps = {});

using IntMatrix = std::vector<std::vector<long>>;  // row-major

// Pullback along a surjection Z^k -> Z^j: result(t) = f(proj * t). proj must
// be j x k with full row rank (checked exactly).
BoundedFn quotient_pullback(const BoundedFn& f, const IntMatrix& proj);

// Transfer along a lattice isomorphism: result(t) = f(U * t), |det U| = 1
// (checked exactly).
BoundedFn iso_transfer(const BoundedFn& f, const IntMatrix& u);

struct ZeroSemigroupResult {
  Eigen::VectorXd value;
  bool invariance_ok = false;
  std::string detail;  // empty when all invariance identities hold
};

// Mean on a finite semigroup with absorbing zero: Mf = f(z). The table must
// be associative and contain an absorbing element (both checked; violations
// throw). The invariance identities M(f_s) = M(sf) = M(f) are verified
// exactly for every s.
ZeroSemigroupResult zero_semigroup_mean(const std::vector<std::vector<uint32_t>>& table,
                                        const std::vector<Eigen::VectorXd>& f);

struct DefectEntry {
  LatticePoint shift;
  double defect = 0.0;
  double bound = 0.0;
};

struct MeanReport {
  long n = 0;
  Eigen::VectorXd value;
  std::vector<DefectEntry> defects;
};

MeanReport mean_report(const BoundedFn& f, long n, const std::vector<LatticePoint>& shifts);

}  // namespace finmon
