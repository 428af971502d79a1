#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finmon/rowvec.hpp"

namespace finmon {

// A finitely supported vector over GF(p): sparse map coordinate -> nonzero
// coefficient, kept sorted by coordinate.
struct Vec0 {
  std::vector<std::pair<uint32_t, uint32_t>> terms;

  static Vec0 make(std::vector<std::pair<uint32_t, uint32_t>> raw, const FieldPrime& f);
  static Vec0 unit(uint32_t i) { return Vec0{{{i, 1}}}; }
  bool operator==(const Vec0&) const = default;
};

// A finite-dimensional subspace of the finite-support sequence space over
// GF(p), in canonical form: RREF rows sorted by pivot ascending, each monic,
// stored packed at the subspace's exact ambient width. The zero subspace has
// dim 0 and ambient width 0. Immutable after construction.
class Subspace {
 public:
  explicit Subspace(const FieldPrime& f = FieldPrime(2)) : L_(f, 0) {}

  // span of generators (Gaussian elimination); the canonical form
  static Subspace span(const std::vector<Vec0>& generators, const FieldPrime& f);
  // adopt an already-RREF row matrix (trimmed to exact ambient width)
  static Subspace from_rref(const RowMat& m);

  const FieldPrime& field() const { return L_.f; }
  const RowLayout& layout() const { return L_; }
  uint32_t dim() const { return dim_; }
  bool is_zero() const { return dim_ == 0; }
  // least n with U contained in GF(p)^n; throws for the zero subspace
  uint32_t ambient_bound() const;
  const uint64_t* row(uint32_t i) const { return words_.data() + static_cast<size_t>(i) * L_.words; }

  Subspace sum(const Subspace& other) const;          // Minkowski sum U + W
  bool contains(const Subspace& other) const;         // other subseteq this
  bool contains(const Vec0& v) const;

  // Total order theta: (ambient, dim, row-serial sequence lex). Only defined
  // between nonzero subspaces of the same field; the zero subspace compares
  // less than every nonzero one for convenience.
  int compare_position(const Subspace& other) const;

  bool operator==(const Subspace& other) const;
  bool operator!=(const Subspace& other) const { return !(*this == other); }

  // stable 128-bit content hash (field, dim, ambient, packed rows)
  std::pair<uint64_t, uint64_t> hash128() const;

  // textual form: generators joined by ';', each a '+'-joined sum of
  // 'c*e<i>' terms with unit coefficients omitted; "0" for the zero subspace
  std::string format() const;
  static Subspace parse(const std::string& text, const FieldPrime& f);

  std::vector<Vec0> rows_as_vecs() const;

 private:
  RowLayout L_;
  uint32_t dim_ = 0;
  std::vector<uint64_t> words_;
};

inline bool is_subspace_of(const Subspace& u, const Subspace& w) { return w.contains(u); }

}  // namespace finmon
