#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <random>
#include <vector>

#include "finmon/enumeration.hpp"
#include "finmon/successor.hpp"
#include "util.hpp"

using namespace finmon;

namespace {

// Linear-scan oracle over the sorted brute-force list: first subspace that
// contains w and lies strictly after bound. Empty if nothing in the list
// qualifies (the true answer then has a larger ambient bound than the list).
std::optional<Subspace> oracle(const std::vector<Subspace>& sorted_all, const Subspace& w,
                               const Subspace* bound) {
  for (const auto& u : sorted_all) {
    if (u.is_zero()) continue;
    if (bound && u.compare_position(*bound) <= 0) continue;
    if (u.contains(w)) return u;
  }
  return std::nullopt;
}

void check_case(const std::vector<Subspace>& sorted_all, uint32_t list_amb, const Subspace& w,
                const Subspace* bound) {
  Subspace got = least_superspace_after(w, bound);
  auto want = oracle(sorted_all, w, bound);
  if (want) {
    REQUIRE(got == *want);
  } else {
    REQUIRE(got.contains(w));
    if (bound) REQUIRE(got.compare_position(*bound) > 0);
    REQUIRE(got.ambient_bound() > list_amb);
  }
}

}  // namespace

TEST_CASE("successor search: exhaustive small cases over GF(2)") {
  FieldPrime f(2);
  auto all5 = testutil::all_subspaces(f, 5);
  std::vector<Subspace> ws, bounds;
  for (const auto& s : all5) {
    if (s.is_zero() || s.ambient_bound() <= 3) ws.push_back(s);
    if (!s.is_zero() && s.ambient_bound() <= 4) bounds.push_back(s);
  }
  for (const auto& w : ws) {
    check_case(all5, 5, w, nullptr);
    for (const auto& b : bounds) check_case(all5, 5, w, &b);
  }
}

TEST_CASE("successor search: randomized cases over GF(2)") {
  FieldPrime f(2);
  auto all6 = testutil::all_subspaces(f, 6);
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 2500; ++iter) {
    Subspace w = testutil::random_subspace(rng, f, 5, 1 + rng() % 4);
    Subspace b = testutil::random_subspace(rng, f, 1 + rng() % 6, 1 + rng() % 4);
    check_case(all6, 6, w, b.is_zero() ? nullptr : &b);
  }
}

TEST_CASE("successor search: exhaustive and randomized cases over GF(3)") {
  FieldPrime f(3);
  auto all4 = testutil::all_subspaces(f, 4);
  std::vector<Subspace> ws, bounds;
  for (const auto& s : all4) {
    if (s.is_zero() || s.ambient_bound() <= 2) ws.push_back(s);
    if (!s.is_zero() && s.ambient_bound() <= 3) bounds.push_back(s);
  }
  for (const auto& w : ws) {
    check_case(all4, 4, w, nullptr);
    for (const auto& b : bounds) check_case(all4, 4, w, &b);
  }
  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 800; ++iter) {
    Subspace w = testutil::random_subspace(rng, f, 3, 1 + rng() % 3);
    Subspace b = testutil::random_subspace(rng, f, 1 + rng() % 4, 1 + rng() % 3);
    check_case(all4, 4, w, b.is_zero() ? nullptr : &b);
  }
}

TEST_CASE("successor chain from zero walks the theta order") {
  for (uint32_t p : {2u, 3u}) {
    FieldPrime f(p);
    uint32_t amb = p == 2 ? 5 : 3;
    auto all = testutil::all_subspaces(f, amb);
    Enumeration e(f);
    Subspace zero(f);
    Subspace cur = least_superspace_after(zero, nullptr);
    REQUIRE(cur == all[1]);
    // stay within the brute-force list: stop one full block early
    size_t steps = 0;
    for (const auto& s : all)
      if (!s.is_zero() && s.ambient_bound() < amb) ++steps;
    for (size_t k = 1; k < steps; ++k) {
      cur = least_superspace_after(zero, &cur);
      REQUIRE(cur == all[k + 1]);
      REQUIRE(e.at(k) == cur);
    }
  }
}

TEST_CASE("successor respects the containment constraint") {
  FieldPrime f(2);
  // the least superspace of a line is the line itself when unbounded
  Subspace line = Subspace::parse("e0+e3", f);
  CHECK(least_superspace_after(line, nullptr) == line);
  // bounded at itself, the result must be strictly larger yet still contain it
  Subspace next = least_superspace_after(line, &line);
  CHECK(next != line);
  CHECK(next.contains(line));
}
