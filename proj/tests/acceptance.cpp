// Acceptance suite: prints exactly one pass/fail line per criterion and
// exits with the number of failed criteria. Criteria are checked against
// independent oracles where one exists (brute-force subspace closure,
// straight-line reconstruction of the first steps, frozen trace hash).
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "finmon/construction.hpp"
#include "finmon/groth.hpp"
#include "finmon/means.hpp"
#include "finmon/successor.hpp"
#include "finmon/trace.hpp"
#include "finmon/verify.hpp"
#include "util.hpp"

using namespace finmon;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s (%s)\n", criterion, pass ? "pass" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Frozen content hash of the first 10000 schedule steps (p = 2); computed
// from two independent runs of this build and fixed here as the regression
// value for construction determinism.
const char* kGoldenTraceSha256 =
    "e12ae430b64bd16a34207329b8120cfe69f8d756364aab16a2f6d69565e04742";

// --- criterion 1: axiom suite with a wall-clock budget -------------------

void criterion1(ConstructionState& st, double budget_s) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyReport r =
      verify_axioms(st, 30, 12, kCheckComm | kCheckAssoc | kCheckCancel | kCheckContain);
  double dt = seconds_since(t0);
  bool ok = r.ok() && dt <= budget_s;
  std::string d = fmt("pairs=%llu triples=%llu cancel=%llu failures=%zu; %.1fs, budget %.0fs",
                      (unsigned long long)r.pairs, (unsigned long long)r.triples,
                      (unsigned long long)r.cancel_pairs, r.failures.size(), dt, budget_s);
  if (!r.failures.empty()) d += "; first: " + r.failures[0].law + " " + r.failures[0].detail;
  report(1, ok, d);
}

// --- criterion 2: unique factorization round trips ------------------------

void criterion2(ConstructionState& st) {
  uint64_t bad = 0, cases = 0;
  for (uint64_t id = 0; id < 30; ++id) {
    Subspace u = st.enumeration().unrank(id);
    Multiset m = st.factor(u);
    bool prime_only = true;
    Subspace acc(st.field());  // zero space, the star identity
    for (const auto& [pid, mult] : m.entries) {
      Subspace e = st.enumeration().unrank(pid);
      if (st.classify(e) != Classify::P) prime_only = false;
      for (uint64_t j = 0; j < mult; ++j) acc = st.star(acc, e);
    }
    ++cases;
    if (!prime_only || acc != u) ++bad;
  }
  report(2, bad == 0, fmt("round trips=%llu bad=%llu", (unsigned long long)cases,
                          (unsigned long long)bad));
}

// --- criterion 3: determinism golden hash ---------------------------------

void criterion3() {
  FieldPrime f(2);
  ConstructionState a(f), b(f);
  std::string ha = sha256_hex(build_trace(a, 10000));
  std::string hb = sha256_hex(build_trace(b, 10000));
  bool ok = ha == hb && ha == kGoldenTraceSha256;
  report(3, ok, fmt("run1=%.12s run2=%.12s golden=%.12s", ha.c_str(), hb.c_str(),
                    kGoldenTraceSha256));
}

// --- criterion 4: enumeration vs brute-force closure ----------------------

void criterion4() {
  FieldPrime f(2);
  Enumeration e(f);
  auto blocks = e.block_sizes(4);
  const long want[] = {1, 3, 11, 51};
  bool ok = blocks.size() == 4;
  for (int i = 0; ok && i < 4; ++i) ok = blocks[i] == want[i];
  // independent recount by spanning-set closure over GF(2)^4
  auto all = testutil::all_subspaces(f, 4);
  std::map<uint32_t, long> by_amb;
  for (const auto& s : all)
    if (!s.is_zero()) ++by_amb[s.ambient_bound()];
  for (int i = 0; ok && i < 4; ++i) ok = by_amb[i + 1] == want[i];
  uint64_t rt_bad = 0;
  for (uint64_t id = 0; id < 1000; ++id)
    if (e.rank(e.unrank(id)) != id) ++rt_bad;
  ok = ok && rt_bad == 0;
  report(4, ok, fmt("blocks=[%s,%s,%s,%s] closure-count ok=%d rank/unrank bad=%llu",
                    blocks[0].get_str().c_str(), blocks[1].get_str().c_str(),
                    blocks[2].get_str().c_str(), blocks[3].get_str().c_str(), (int)ok,
                    (unsigned long long)rt_bad));
}

// --- criterion 5: first-steps oracle ---------------------------------------

void criterion5(ConstructionState& st) {
  FieldPrime f(2);
  Subspace e0 = Subspace::parse("e0", f);
  Subspace e01 = Subspace::parse("e0;e1", f);
  Subspace e012 = Subspace::parse("e0;e1;e2", f);
  bool ok = st.star(e0, e0) == e01 && st.star(e0, e01) == e012;
  // straight-line replay of the first three processed steps from the
  // definition: raise the watermark past the top element, span the lower
  // bound from elements and children, take the least superspace after it
  Subspace wm = e0;
  Subspace w1 = least_superspace_after(e0, &wm);  // {0^2}: lower bound <e0>
  wm = w1;
  Subspace w2 = least_superspace_after(w1, &wm);  // {0^3}: lower bound g({0^2})
  wm = w2;
  Subspace lower3 = e0.sum(Subspace::parse("e1", f));
  Subspace w3 = least_superspace_after(lower3, &wm);  // {1,0}: lower bound <e0,e1>
  ok = ok && w1 == e01 && w2 == e012 && w3 == Subspace::parse("e0;e1;e3", f);
  auto d1 = st.dom_lookup(parse_multiset("{0^2}"));
  auto d2 = st.dom_lookup(parse_multiset("{0^3}"));
  auto d3 = st.dom_lookup(parse_multiset("{1, 0}"));
  ok = ok && d1 && *d1 == w1 && d2 && *d2 == w2 && d3 && *d3 == w3;
  report(5, ok, fmt("star products and straight-line first steps: w1=%s w2=%s w3=%s",
                    w1.format().c_str(), w2.format().c_str(), w3.format().c_str()));
}

// --- criterion 6: Grothendieck group ---------------------------------------

Multiset random_p_multiset(std::mt19937_64& rng, long max_grade) {
  // parts drawn from the prime ids of grade <= 9 (id 3 is composite)
  static const unsigned long pool[] = {0, 1, 2, 4, 5, 6, 7, 8};
  Multiset m;
  long g = 0;
  std::uniform_int_distribution<size_t> pick(0, std::size(pool) - 1);
  for (int tries = 0; tries < 16; ++tries) {
    unsigned long id = pool[pick(rng)];
    if (g + (long)id + 1 > max_grade) continue;
    m = disjoint_union(m, Multiset::single(mpz_class(id)));
    g += (long)id + 1;
  }
  return m;
}

void enumerate_p_multisets(long max_grade, unsigned long min_id, Multiset cur,
                           std::vector<Multiset>& out) {
  out.push_back(cur);
  static const unsigned long pool[] = {0, 1, 2, 4, 5, 6, 7};
  for (unsigned long id : pool) {
    if (id < min_id || (long)id + 1 > max_grade) continue;
    enumerate_p_multisets(max_grade - (long)id - 1, id,
                          disjoint_union(cur, Multiset::single(mpz_class(id))), out);
  }
}

void criterion6(ConstructionState& st) {
  std::mt19937_64 rng(0x5eed6);
  uint64_t triples = 0, bad = 0;
  for (int it = 0; it < 10000; ++it) {
    Multiset s = random_p_multiset(rng, 10), t = random_p_multiset(rng, 10);
    Multiset u = random_p_multiset(rng, 4), w = random_p_multiset(rng, 4);
    MonoidPair a{s, t};
    MonoidPair b{disjoint_union(s, u), disjoint_union(t, u)};
    MonoidPair c{disjoint_union(b.s, w), disjoint_union(b.t, w)};
    ++triples;
    if (!(pair_equiv(a, a) && pair_equiv(a, b) && pair_equiv(b, a) && pair_equiv(b, c) &&
          pair_equiv(a, c)))
      ++bad;
  }
  // normalize is a complete invariant: exhaustive over prime-id multisets
  // of grade <= 8 paired in all ways
  std::vector<Multiset> ms;
  enumerate_p_multisets(8, 0, Multiset{}, ms);
  std::vector<MonoidPair> pairs;
  for (const auto& s : ms)
    for (const auto& t : ms) pairs.push_back({s, t});
  std::vector<GrothElem> norm;
  norm.reserve(pairs.size());
  for (const auto& p : pairs) norm.push_back(normalize(p, st));
  uint64_t inv_bad = 0, inv_cases = 0;
  for (size_t i = 0; i < pairs.size(); ++i)
    for (size_t j = i + 1; j < pairs.size(); ++j) {
      ++inv_cases;
      if (pair_equiv(pairs[i], pairs[j]) != (norm[i] == norm[j])) ++inv_bad;
    }
  // the embedding is homomorphic and injective on ids < 30
  std::vector<Subspace> els;
  std::vector<GrothElem> emb;
  for (uint64_t id = 0; id < 30; ++id) {
    els.push_back(st.enumeration().unrank(id));
    emb.push_back(embed(els.back(), st));
  }
  uint64_t emb_bad = 0;
  for (size_t i = 0; i < els.size(); ++i) {
    for (size_t j = 0; j < els.size(); ++j)
      if (embed(st.star(els[i], els[j]), st) != g_add(emb[i], emb[j])) ++emb_bad;
    for (size_t j = i + 1; j < els.size(); ++j)
      if (els[i] != els[j] && emb[i] == emb[j]) ++emb_bad;
  }
  report(6, bad == 0 && inv_bad == 0 && emb_bad == 0,
         fmt("equiv triples=%llu bad=%llu; invariant cases=%llu bad=%llu; embed bad=%llu",
             (unsigned long long)triples, (unsigned long long)bad,
             (unsigned long long)inv_cases, (unsigned long long)inv_bad,
             (unsigned long long)emb_bad));
}

// --- criterion 7: means, exact identities -----------------------------------

std::vector<std::vector<std::vector<uint32_t>>> zero_tables(uint32_t max_size) {
  // every table has the absorbing zero 0; three associative families
  std::vector<std::vector<std::vector<uint32_t>>> out;
  for (uint32_t n = 1; n <= max_size; ++n) {
    std::vector<std::vector<uint32_t>> null_sg(n, std::vector<uint32_t>(n, 0));
    out.push_back(null_sg);  // xy = 0 everywhere
    std::vector<std::vector<uint32_t>> band(n, std::vector<uint32_t>(n, 0));
    for (uint32_t i = 0; i < n; ++i) band[i][i] = i;  // xx = x, else 0
    out.push_back(band);
    std::vector<std::vector<uint32_t>> meet(n, std::vector<uint32_t>(n, 0));
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j) meet[i][j] = std::min(i, j);  // chain semilattice
    out.push_back(meet);
  }
  return out;
}

void criterion7() {
  std::mt19937_64 rng(0x5eed7);
  uint64_t dec_bad = 0, dec_cases = 0;
  for (int it = 0; it < 1000; ++it) {
    uint32_t k = 1 + (uint32_t)(rng() % 3);
    long n = 1 + (long)(rng() % 8);
    uint32_t i = 1 + (uint32_t)(rng() % k);
    BoundedFn f = random_fn({LatticeKind::Nk, k}, rng(), n);
    std::string w;
    ++dec_cases;
    if (!check_groth_decomposition(f, i, n, &w)) ++dec_bad;
  }
  uint64_t dis_bad = 0, dis_cases = 0;
  for (uint32_t k = 1; k <= 3; ++k)
    for (uint32_t i = 1; i <= k; ++i)
      for (long m = 1; m <= 10; ++m) {
        ++dis_cases;
        if (!disjoint_support_translates(slab_indicator({LatticeKind::Zk, k}, i, 0), i, m, 12))
          ++dis_bad;
      }
  uint64_t zs_bad = 0, zs_cases = 0;
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (const auto& table : zero_tables(5)) {
    std::vector<Eigen::VectorXd> fv;
    for (size_t s = 0; s < table.size(); ++s) {
      Eigen::VectorXd x(2);
      x << val(rng), val(rng);
      fv.push_back(x);
    }
    ++zs_cases;
    ZeroSemigroupResult r = zero_semigroup_mean(table, fv);
    if (!r.invariance_ok || r.value != fv[0]) ++zs_bad;
  }
  report(7, dec_bad == 0 && dis_bad == 0 && zs_bad == 0,
         fmt("decompositions=%llu bad=%llu; disjoint=%llu bad=%llu; zero-semigroups=%llu bad=%llu",
             (unsigned long long)dec_cases, (unsigned long long)dec_bad,
             (unsigned long long)dis_cases, (unsigned long long)dis_bad,
             (unsigned long long)zs_cases, (unsigned long long)zs_bad));
}

// --- criterion 8: means, quantitative ----------------------------------------

void criterion8(double budget_s) {
  auto t0 = std::chrono::steady_clock::now();
  uint64_t kb_bad = 0, kb_cases = 0;
  for (uint32_t k = 1; k <= 3; ++k)
    for (uint32_t i = 1; i <= k; ++i)
      for (long c : {-2L, -1L, 0L, 1L, 2L})
        for (long n : {2L, 5L, 10L}) {
          ++kb_cases;
          try {
            KernelBound b = kernel_mean_bound(slab_indicator({LatticeKind::Zk, k}, i, c), i, c, n);
            if (b.measured > b.bound) ++kb_bad;
          } catch (const std::exception&) {
            ++kb_bad;
          }
        }
  uint64_t lift_bad = 0, lift_cases = 0;
  double final_defect = 0;
  for (uint32_t k = 1; k <= 2; ++k) {
    BoundedFn fp = lift_abs(point_indicator({LatticeKind::Nk, k}, LatticePoint(k, 1)));
    for (uint32_t i = 1; i <= k; ++i) {
      LatticePoint ei(k, 0);
      ei[i - 1] = 1;
      for (long n : {1L, 2L, 5L, 20L, 100L, 200L}) {
        double d = invariance_defect(fp, ei, n);
        ++lift_cases;
        if (d > 4.0 / (2 * n + 1) + 1e-12) ++lift_bad;
        if (n == 200) {
          final_defect = std::max(final_defect, d);
          if (d >= 1e-2) ++lift_bad;
        }
      }
    }
  }
  double dt = seconds_since(t0);
  report(8, kb_bad == 0 && lift_bad == 0 && dt <= budget_s,
         fmt("kernel=%llu bad=%llu; lift defects=%llu bad=%llu max@n=200=%.2e; %.1fs, budget %.0fs",
             (unsigned long long)kb_cases, (unsigned long long)kb_bad,
             (unsigned long long)lift_cases, (unsigned long long)lift_bad, final_defect, dt,
             budget_s));
}

// --- criterion 9: product-with-exponent monoid -------------------------------

void criterion9(ConstructionState& st) {
  using Elem = std::pair<Subspace, uint64_t>;
  std::vector<Elem> els;
  els.emplace_back(Subspace(st.field()), 0);  // the identity ({0}, 0)
  for (uint64_t id = 0; id < 30; ++id)
    for (uint64_t e = 1; e <= 3; ++e) els.emplace_back(st.enumeration().unrank(id), e);
  uint64_t bad = 0, pairs = 0;
  Elem ident{Subspace(st.field()), 0};
  for (const auto& x : els) {
    Elem xi = theorem_a_op(st, x, ident);
    if (xi.first != x.first || xi.second != x.second) ++bad;
    for (const auto& y : els) {
      ++pairs;
      Elem xy = theorem_a_op(st, x, y);
      Elem yx = theorem_a_op(st, y, x);
      if (xy.first != yx.first || xy.second != yx.second) ++bad;
      if (!xy.first.contains(x.first) || !xy.first.contains(y.first)) ++bad;
      if (xy.second != x.second + y.second) ++bad;
    }
  }
  uint64_t triples = 0;
  for (uint64_t a = 0; a < 12; ++a)
    for (uint64_t b = 0; b < 12; ++b)
      for (uint64_t c = 0; c < 12; ++c) {
        Elem x{st.enumeration().unrank(a), 1}, y{st.enumeration().unrank(b), 2},
            z{st.enumeration().unrank(c), 3};
        Elem l = theorem_a_op(st, theorem_a_op(st, x, y), z);
        Elem r = theorem_a_op(st, x, theorem_a_op(st, y, z));
        ++triples;
        if (l.first != r.first || l.second != r.second) ++bad;
      }
  report(9, bad == 0, fmt("pairs=%llu assoc triples=%llu bad=%llu", (unsigned long long)pairs,
                          (unsigned long long)triples, (unsigned long long)bad));
}

}  // namespace

int main() {
  FieldPrime f(2);
  ConstructionState st(f);
  criterion1(st, 300.0);
  criterion2(st);
  criterion3();
  criterion4();
  criterion5(st);
  criterion6(st);
  criterion7();
  criterion8(60.0);
  criterion9(st);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
