#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "finmon/rowvec.hpp"
#include "finmon/subspace.hpp"
#include "util.hpp"

using namespace finmon;

TEST_CASE("prime field arithmetic") {
  for (uint32_t p : {2u, 3u, 5u, 7u, 13u, 251u}) {
    FieldPrime f(p);
    CHECK(f.p == p);
    for (uint32_t a = 0; a < p; ++a) {
      for (uint32_t b = 0; b < p; ++b) {
        CHECK(f.add(a, b) == (a + b) % p);
        CHECK(f.sub(f.add(a, b), b) == a);
        CHECK(f.mul(a, b) == (a * b) % p);
      }
      CHECK(f.add(a, f.neg(a)) == 0);
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
    }
  }
  CHECK_THROWS_AS(FieldPrime(1), std::invalid_argument);
  CHECK_THROWS_AS(FieldPrime(4), std::invalid_argument);
  CHECK_THROWS_AS(FieldPrime(91), std::invalid_argument);
  CHECK(is_prime(2));
  CHECK(is_prime(65521));
  CHECK(!is_prime(0));
  CHECK(!is_prime(65535));
}

TEST_CASE("row packing round-trips and is width-independent") {
  std::mt19937_64 rng(7);
  for (uint32_t p : {2u, 3u, 5u, 7u}) {
    FieldPrime f(p);
    std::uniform_int_distribution<uint32_t> digit(0, p - 1);
    for (uint32_t n : {1u, 5u, 63u, 64u, 65u, 200u}) {
      RowLayout L(f, n);
      std::vector<uint64_t> r(L.words, 0);
      std::vector<uint32_t> ref(n, 0);
      for (int iter = 0; iter < 400; ++iter) {
        uint32_t c = rng() % n;
        uint32_t v = digit(rng);
        row_set(r.data(), L, c, v);
        ref[c] = v;
      }
      for (uint32_t c = 0; c < n; ++c) CHECK(row_get(r.data(), L, c) == ref[c]);
      // widening: same digits readable under a wider layout after zero-pad
      RowLayout W(f, n + 37);
      std::vector<uint64_t> w(W.words, 0);
      std::memcpy(w.data(), r.data(), L.words * sizeof(uint64_t));
      for (uint32_t c = 0; c < n; ++c) CHECK(row_get(w.data(), W, c) == ref[c]);
      for (uint32_t c = n; c < n + 37; ++c) CHECK(row_get(w.data(), W, c) == 0);
    }
  }
}

namespace {

std::vector<uint32_t> unpack(const uint64_t* r, const RowLayout& L) {
  std::vector<uint32_t> out(L.cols);
  for (uint32_t c = 0; c < L.cols; ++c) out[c] = row_get(r, L, c);
  return out;
}

}  // namespace

TEST_CASE("row operations match naive digit arithmetic") {
  std::mt19937_64 rng(11);
  for (uint32_t p : {2u, 3u, 7u}) {
    FieldPrime f(p);
    RowLayout L(f, 97);
    std::uniform_int_distribution<uint32_t> digit(0, p - 1);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<uint64_t> a(L.words, 0), b(L.words, 0);
      for (uint32_t c = 0; c < L.cols; ++c) {
        row_set(a.data(), L, c, digit(rng));
        row_set(b.data(), L, c, digit(rng));
      }
      auto av = unpack(a.data(), L), bv = unpack(b.data(), L);
      uint32_t coef = digit(rng);
      auto a2 = a;
      row_submul(a2.data(), b.data(), coef, L);
      for (uint32_t c = 0; c < L.cols; ++c)
        REQUIRE(row_get(a2.data(), L, c) == f.sub(av[c], f.mul(coef, bv[c])));
      auto a3 = a;
      row_scale(a3.data(), coef, L);
      for (uint32_t c = 0; c < L.cols; ++c)
        REQUIRE(row_get(a3.data(), L, c) == f.mul(coef, av[c]));
      // pivot / top / zero
      int piv = -1, top = -1;
      for (int c = L.cols - 1; c >= 0; --c)
        if (av[c]) {
          piv = c;
          if (top < 0) top = c;
        }
      REQUIRE(row_pivot(a.data(), L) == piv);
      REQUIRE(row_top(a.data(), L) == top);
      REQUIRE(row_is_zero(a.data(), L) == (piv == -1));
      // serial comparison = lexicographic from the highest digit down
      int naive = 0;
      for (int c = L.cols - 1; c >= 0 && naive == 0; --c)
        naive = av[c] < bv[c] ? -1 : (av[c] > bv[c] ? 1 : 0);
      int got = row_cmp(a.data(), b.data(), L);
      REQUIRE((got < 0 ? -1 : got > 0 ? 1 : 0) == naive);
    }
  }
}

TEST_CASE("rref produces a reduced basis of the same row space") {
  std::mt19937_64 rng(13);
  for (uint32_t p : {2u, 3u, 5u}) {
    FieldPrime f(p);
    std::uniform_int_distribution<uint32_t> digit(0, p - 1);
    for (int iter = 0; iter < 300; ++iter) {
      uint32_t n = 1 + rng() % 9, k = 1 + rng() % 6;
      RowMat orig{RowLayout(f, n)};
      for (uint32_t i = 0; i < k; ++i) {
        uint64_t* r = orig.append_zero_row();
        for (uint32_t c = 0; c < n; ++c) row_set(r, orig.layout(), c, digit(rng));
      }
      RowMat m = orig;
      m.rref();
      // pivots strictly ascending, rows monic, pivot columns cleared elsewhere
      int prev = -1;
      for (uint32_t i = 0; i < m.rows(); ++i) {
        int piv = m.pivot_of(i);
        REQUIRE(piv > prev);
        prev = piv;
        REQUIRE(row_get(m.row(i), m.layout(), piv) == 1);
        for (uint32_t j = 0; j < m.rows(); ++j)
          if (j != i) REQUIRE(row_get(m.row(j), m.layout(), piv) == 0);
      }
      // same row space both ways
      for (uint32_t i = 0; i < orig.rows(); ++i) REQUIRE(m.spans(orig.row(i)));
      RowMat back = orig;
      back.rref();
      for (uint32_t i = 0; i < m.rows(); ++i) REQUIRE(back.spans(m.row(i)));
      // idempotent
      RowMat again = m;
      again.rref();
      REQUIRE(again.rows() == m.rows());
      for (uint32_t i = 0; i < m.rows(); ++i)
        REQUIRE(row_cmp(again.row(i), m.row(i), m.layout()) == 0);
    }
  }
}

TEST_CASE("subspace canonical form, sum, containment") {
  FieldPrime f2(2);
  std::mt19937_64 rng(17);
  for (uint32_t p : {2u, 3u}) {
    FieldPrime f(p);
    for (int iter = 0; iter < 300; ++iter) {
      Subspace a = testutil::random_subspace(rng, f, 6, 1 + rng() % 3);
      Subspace b = testutil::random_subspace(rng, f, 6, 1 + rng() % 3);
      Subspace s = a.sum(b);
      REQUIRE(s.contains(a));
      REQUIRE(s.contains(b));
      REQUIRE(s == b.sum(a));
      REQUIRE(s.sum(a) == s);
      REQUIRE(a.contains(a));
      if (a.contains(b) && b.contains(a)) REQUIRE(a == b);
      // span is invariant under shuffling / duplicating generators
      auto gens = s.rows_as_vecs();
      std::shuffle(gens.begin(), gens.end(), rng);
      gens.push_back(gens.front());
      REQUIRE(Subspace::span(gens, f) == s);
    }
  }
  // exact ambient width
  Subspace u = Subspace::parse("e2", f2);
  CHECK(u.ambient_bound() == 3);
  CHECK(u.dim() == 1);
  Subspace z(f2);
  CHECK(z.is_zero());
  CHECK_THROWS_AS(z.ambient_bound(), std::domain_error);
  CHECK(u.contains(z));
  CHECK(!z.contains(u));
}

TEST_CASE("position order is a total order refining (ambient, dim)") {
  FieldPrime f(2);
  auto all = testutil::all_subspaces(f, 4);
  for (size_t i = 0; i < all.size(); ++i) {
    REQUIRE(all[i].compare_position(all[i]) == 0);
    for (size_t j = i + 1; j < all.size(); ++j) {
      REQUIRE(all[i].compare_position(all[j]) < 0);
      REQUIRE(all[j].compare_position(all[i]) > 0);
    }
  }
  // zero first, then grouped by ambient then dim
  REQUIRE(all[0].is_zero());
  for (size_t i = 2; i < all.size(); ++i) {
    auto &a = all[i - 1], &b = all[i];
    REQUIRE(a.ambient_bound() <= b.ambient_bound());
    if (a.ambient_bound() == b.ambient_bound()) REQUIRE(a.dim() <= b.dim());
  }
}

TEST_CASE("format/parse round-trip and syntax errors") {
  std::mt19937_64 rng(19);
  for (uint32_t p : {2u, 5u}) {
    FieldPrime f(p);
    for (int iter = 0; iter < 200; ++iter) {
      Subspace a = testutil::random_subspace(rng, f, 8, 1 + rng() % 4);
      REQUIRE(Subspace::parse(a.format(), f) == a);
    }
  }
  FieldPrime f3(3);
  CHECK(Subspace::parse("0", f3).is_zero());
  CHECK(Subspace::parse("e0+2*e1;e2", f3).dim() == 2);
  CHECK(Subspace::parse("e1 + 2*e3", f3) == Subspace::parse("2*e1+e3", f3));  // scalar multiple
  CHECK(Subspace::parse("3*e1", f3).is_zero());                               // coefficient mod p
  CHECK_THROWS_AS(Subspace::parse("x1", f3), std::invalid_argument);
  CHECK_THROWS_AS(Subspace::parse("2e1", f3), std::invalid_argument);
  CHECK_THROWS_AS(Subspace::parse("e1++e2", f3), std::invalid_argument);
}

TEST_CASE("content hash separates all small subspaces") {
  for (uint32_t p : {2u, 3u}) {
    FieldPrime f(p);
    auto all = testutil::all_subspaces(f, p == 2 ? 5 : 4);
    std::set<std::pair<uint64_t, uint64_t>> hashes;
    for (const auto& s : all) hashes.insert(s.hash128());
    CHECK(hashes.size() == all.size());
  }
}
