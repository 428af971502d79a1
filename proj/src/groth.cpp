#include "finmon/groth.hpp"

#include <stdexcept>

namespace finmon {

bool pair_equiv(const MonoidPair& a, const MonoidPair& b) {
  return disjoint_union(a.s, b.t) == disjoint_union(a.t, b.s);
}

GrothElem normalize(const MonoidPair& a, ConstructionState& st) {
  GrothElem out;
  auto fold = [&](const Multiset& m, long sign) {
    for (const auto& [id, mult] : m.entries) {
      if (st.classify(st.enumeration().unrank(id)) != Classify::P)
        throw std::invalid_argument("normalize: id " + id.get_str() + " is composite");
      long& e = out.exponents[id];
      e += sign * static_cast<long>(mult);
      if (e == 0) out.exponents.erase(id);
    }
  };
  fold(a.s, +1);
  fold(a.t, -1);
  return out;
}

GrothElem g_add(const GrothElem& x, const GrothElem& y) {
  GrothElem out = x;
  for (const auto& [id, e] : y.exponents) {
    long& v = out.exponents[id];
    v += e;
    if (v == 0) out.exponents.erase(id);
  }
  return out;
}

GrothElem g_neg(const GrothElem& x) {
  GrothElem out;
  for (const auto& [id, e] : x.exponents) out.exponents.emplace(id, -e);
  return out;
}

GrothElem embed(const Subspace& f, ConstructionState& st) {
  return normalize(MonoidPair{st.factor(f), Multiset{}}, st);
}

std::string format_groth(const GrothElem& x) {
  if (x.is_zero()) return "0";
  std::string out;
  for (const auto& [id, e] : x.exponents) {
    if (!out.empty()) out += ' ';
    out += e > 0 ? "+" : "−";
    out += std::to_string(e > 0 ? e : -e);
    out += "·[id" + id.get_str() + "]";
  }
  return out;
}

}  // namespace finmon
