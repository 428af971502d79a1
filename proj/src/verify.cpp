#include "finmon/verify.hpp"

#include <map>

#include "finmon/groth.hpp"

namespace finmon {

namespace {

std::string describe(size_t i, const std::vector<Subspace>& elems) {
  if (elems[i].is_zero()) return "{0}";
  return "id " + std::to_string(i - 1) + " = " + elems[i].format();
}

}  // namespace

VerifyReport verify_axioms(ConstructionState& st, uint64_t max_id, uint64_t assoc_max_id,
                           unsigned checks) {
  VerifyReport rep;
  const FieldPrime& f = st.field();
  std::vector<Subspace> elems;
  elems.emplace_back(f);  // the identity {0}
  for (uint64_t id = 0; id < max_id; ++id) elems.push_back(st.enumeration().unrank(id));
  size_t n = elems.size();

  // one star table shared by every law below
  std::vector<std::vector<Subspace>> prod(n);
  for (size_t i = 0; i < n; ++i) {
    prod[i].reserve(n);
    for (size_t j = 0; j < n; ++j) prod[i].push_back(st.star(elems[i], elems[j]));
  }

  if (checks & kCheckIdentity) {
    for (size_t i = 0; i < n; ++i)
      if (prod[0][i] != elems[i] || prod[i][0] != elems[i])
        rep.failures.push_back(
            {"identity", "star with {0} changed " + describe(i, elems)});
  }

  if (checks & (kCheckComm | kCheckContain)) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        ++rep.pairs;
        if ((checks & kCheckComm) && prod[i][j] != prod[j][i])
          rep.failures.push_back({"commutativity", describe(i, elems) + " vs " +
                                                       describe(j, elems)});
        if ((checks & kCheckContain) &&
            (!prod[i][j].contains(elems[i]) || !prod[i][j].contains(elems[j])))
          rep.failures.push_back({"containment", describe(i, elems) + " * " +
                                                     describe(j, elems) + " = " +
                                                     prod[i][j].format()});
      }
  }

  if (checks & kCheckCancel) {
    for (size_t h = 0; h < n; ++h) {
      std::map<std::string, size_t> seen;  // F*H -> F
      for (size_t i = 0; i < n; ++i) {
        ++rep.cancel_pairs;
        auto [it, fresh] = seen.emplace(prod[i][h].format(), i);
        if (!fresh)
          rep.failures.push_back(
              {"cancellativity", describe(it->second, elems) + " * H = " +
                                     describe(i, elems) + " * H for H = " +
                                     describe(h, elems)});
      }
    }
  }

  if (checks & kCheckAssoc) {
    size_t m = std::min<size_t>(n, assoc_max_id + 1);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        for (size_t k = 0; k < m; ++k) {
          ++rep.triples;
          Subspace left = st.star(prod[i][j], elems[k]);
          Subspace right = st.star(elems[i], prod[j][k]);
          if (left != right)
            rep.failures.push_back(
                {"associativity", "(" + describe(i, elems) + ", " + describe(j, elems) +
                                      ", " + describe(k, elems) + ")"});
        }
  }

  if (checks & kCheckFactor) {
    for (size_t i = 0; i < n; ++i) {
      ++rep.factor_cases;
      Multiset a = st.factor(elems[i]);
      bool prime_parts = true;
      Subspace fold(f);
      for (const auto& [id, mult] : a.entries) {
        Subspace u = st.enumeration().unrank(id);
        if (st.classify(u) != Classify::P) prime_parts = false;
        for (uint64_t c = 0; c < mult; ++c) fold = st.star(fold, u);
      }
      if (!prime_parts)
        rep.failures.push_back(
            {"factorization", "composite factor in " + format_multiset(a) + " of " +
                                  describe(i, elems)});
      if (fold != elems[i] || st.f_apply(a) != elems[i])
        rep.failures.push_back({"factorization", "round trip failed for " +
                                                     describe(i, elems) + ", factors " +
                                                     format_multiset(a)});
    }
  }

  if (checks & kCheckGroth) {
    std::vector<GrothElem> emb;
    emb.reserve(n);
    for (size_t i = 0; i < n; ++i) emb.push_back(embed(elems[i], st));
    std::map<std::string, size_t> seen;
    for (size_t i = 0; i < n; ++i) {
      auto [it, fresh] = seen.emplace(format_groth(emb[i]), i);
      if (!fresh)
        rep.failures.push_back({"groth-injectivity", describe(it->second, elems) +
                                                         " and " + describe(i, elems) +
                                                         " embed equally"});
    }
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        ++rep.groth_cases;
        if (embed(prod[i][j], st) != g_add(emb[i], emb[j]))
          rep.failures.push_back({"groth-homomorphism", describe(i, elems) + " * " +
                                                            describe(j, elems)});
      }
  }

  return rep;
}

std::string format_report(const VerifyReport& r) {
  std::string out;
  out += "pairs=" + std::to_string(r.pairs);
  out += " triples=" + std::to_string(r.triples);
  out += " cancel_pairs=" + std::to_string(r.cancel_pairs);
  out += " factor_cases=" + std::to_string(r.factor_cases);
  out += " groth_cases=" + std::to_string(r.groth_cases);
  out += " failures=" + std::to_string(r.failures.size());
  for (const auto& fl : r.failures) out += "\n  FAIL " + fl.law + ": " + fl.detail;
  return out;
}

}  // namespace finmon
