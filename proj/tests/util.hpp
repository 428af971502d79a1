#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "finmon/subspace.hpp"

namespace testutil {

using namespace finmon;

// Every subspace of GF(p)^n (zero space included), produced by closing sets
// of spanning vectors under span-extension and deduplicating canonical forms.
// Independent of the enumeration module; sorted by the theta position order.
inline std::vector<Subspace> all_subspaces(const FieldPrime& f, uint32_t n) {
  std::vector<Vec0> vecs;
  uint64_t total = 1;
  for (uint32_t i = 0; i < n; ++i) total *= f.p;
  for (uint64_t code = 1; code < total; ++code) {
    Vec0 v;
    uint64_t c = code;
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t d = static_cast<uint32_t>(c % f.p);
      c /= f.p;
      if (d) v.terms.emplace_back(i, d);
    }
    vecs.push_back(std::move(v));
  }
  std::map<std::string, Subspace> seen;
  std::vector<Subspace> frontier{Subspace(f)};
  seen.emplace("0", Subspace(f));
  while (!frontier.empty()) {
    std::vector<Subspace> next;
    for (const auto& s : frontier) {
      for (const auto& v : vecs) {
        if (s.contains(v)) continue;
        auto gens = s.rows_as_vecs();
        gens.push_back(v);
        Subspace t = Subspace::span(gens, f);
        auto [it, inserted] = seen.emplace(t.format(), t);
        (void)it;
        if (inserted) next.push_back(std::move(t));
      }
    }
    frontier = std::move(next);
  }
  std::vector<Subspace> out;
  out.reserve(seen.size());
  for (auto& [key, s] : seen) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(),
            [](const Subspace& a, const Subspace& b) { return a.compare_position(b) < 0; });
  return out;
}

// A uniformly random d-generator span inside GF(p)^n (dim may come out < d).
inline Subspace random_subspace(std::mt19937_64& rng, const FieldPrime& f, uint32_t n,
                                uint32_t d) {
  std::uniform_int_distribution<uint32_t> digit(0, f.p - 1);
  std::vector<Vec0> gens;
  for (uint32_t k = 0; k < d; ++k) {
    std::vector<std::pair<uint32_t, uint32_t>> terms;
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t c = digit(rng);
      if (c) terms.emplace_back(i, c);
    }
    gens.push_back(Vec0::make(std::move(terms), f));
  }
  return Subspace::span(gens, f);
}

}  // namespace testutil
