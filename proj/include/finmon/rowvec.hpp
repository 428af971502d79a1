#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "finmon/field.hpp"

namespace finmon {

// Layout of one packed row vector over GF(p) with a fixed column count.
// Digit i lives in word i / digits_per_word, slot i % digits_per_word.
// The packing of a given digit index does not depend on `cols`, so
// widening a row is copy + zero-pad.
struct RowLayout {
  FieldPrime f;
  uint32_t cols = 0;
  uint32_t words = 0;

  RowLayout() = default;
  RowLayout(const FieldPrime& field, uint32_t ncols)
      : f(field), cols(ncols), words((ncols + field.digits_per_word - 1) / field.digits_per_word) {}
};

inline uint32_t row_get(const uint64_t* r, const RowLayout& L, uint32_t c) {
  uint32_t w = c / L.f.digits_per_word, s = c % L.f.digits_per_word;
  return static_cast<uint32_t>((r[w] >> (s * L.f.bits)) & ((uint64_t(1) << L.f.bits) - 1));
}

inline void row_set(uint64_t* r, const RowLayout& L, uint32_t c, uint32_t v) {
  uint32_t w = c / L.f.digits_per_word, s = c % L.f.digits_per_word;
  uint64_t mask = ((uint64_t(1) << L.f.bits) - 1) << (s * L.f.bits);
  r[w] = (r[w] & ~mask) | (static_cast<uint64_t>(v) << (s * L.f.bits));
}

void row_clear(uint64_t* r, const RowLayout& L);
bool row_is_zero(const uint64_t* r, const RowLayout& L);
int row_pivot(const uint64_t* r, const RowLayout& L);  // lowest nonzero col, -1 if zero
int row_top(const uint64_t* r, const RowLayout& L);    // highest nonzero col, -1 if zero

// dst -= c * src  (mod p)
void row_submul(uint64_t* dst, const uint64_t* src, uint32_t c, const RowLayout& L);
// r *= c  (mod p)
void row_scale(uint64_t* r, uint32_t c, const RowLayout& L);

// Compare rows by their serial number sum(digit_i * p^i): lexicographic on
// digits from the highest column down, which equals word comparison from the
// top. Returns <0, 0, >0.
int row_cmp(const uint64_t* a, const uint64_t* b, const RowLayout& L);

// A mutable stack of rows sharing one layout; the workhorse behind Subspace
// canonicalization, sums, and the construction engine.
class RowMat {
 public:
  RowMat() = default;
  explicit RowMat(const RowLayout& L) : L_(L) {}

  const RowLayout& layout() const { return L_; }
  uint32_t rows() const { return nrows_; }
  uint64_t* row(uint32_t i) { return data_.data() + static_cast<size_t>(i) * L_.words; }
  const uint64_t* row(uint32_t i) const { return data_.data() + static_cast<size_t>(i) * L_.words; }

  void clear() { nrows_ = 0; data_.clear(); }
  uint64_t* append_zero_row();
  void append_row(const uint64_t* r, const RowLayout& src);  // src.cols <= cols

  // In-place reduced row echelon form; rows end up sorted by pivot
  // ascending, each monic, zero rows dropped.
  void rref();

  // Reduce r (layout L_) against this RREF matrix in place.
  void reduce(uint64_t* r) const;
  // True iff r reduces to zero against this RREF matrix.
  bool spans(const uint64_t* r) const;

  int pivot_of(uint32_t i) const { return row_pivot(row(i), L_); }

 private:
  RowLayout L_;
  uint32_t nrows_ = 0;
  std::vector<uint64_t> data_;
};

}  // namespace finmon
