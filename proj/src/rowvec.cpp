#include "finmon/rowvec.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace finmon {

void row_clear(uint64_t* r, const RowLayout& L) {
  std::memset(r, 0, L.words * sizeof(uint64_t));
}

bool row_is_zero(const uint64_t* r, const RowLayout& L) {
  for (uint32_t w = 0; w < L.words; ++w)
    if (r[w]) return false;
  return true;
}

int row_pivot(const uint64_t* r, const RowLayout& L) {
  for (uint32_t w = 0; w < L.words; ++w) {
    if (r[w]) {
      uint32_t slot = static_cast<uint32_t>(std::countr_zero(r[w])) / L.f.bits;
      return static_cast<int>(w * L.f.digits_per_word + slot);
    }
  }
  return -1;
}

int row_top(const uint64_t* r, const RowLayout& L) {
  for (uint32_t w = L.words; w-- > 0;) {
    if (r[w]) {
      uint32_t slot = (63u - static_cast<uint32_t>(std::countl_zero(r[w]))) / L.f.bits;
      return static_cast<int>(w * L.f.digits_per_word + slot);
    }
  }
  return -1;
}

void row_submul(uint64_t* dst, const uint64_t* src, uint32_t c, const RowLayout& L) {
  if (c == 0) return;
  if (L.f.p == 2) {
    for (uint32_t w = 0; w < L.words; ++w) dst[w] ^= src[w];
    return;
  }
  const uint32_t dpw = L.f.digits_per_word, bits = L.f.bits;
  const uint64_t digit_mask = (uint64_t(1) << bits) - 1;
  for (uint32_t w = 0; w < L.words; ++w) {
    uint64_t s = src[w];
    if (!s) continue;
    uint64_t d = dst[w], out = 0;
    for (uint32_t k = 0; k < dpw; ++k) {
      uint32_t sd = static_cast<uint32_t>((s >> (k * bits)) & digit_mask);
      uint32_t dd = static_cast<uint32_t>((d >> (k * bits)) & digit_mask);
      uint32_t nd = L.f.sub(dd, L.f.mul(c, sd));
      out |= static_cast<uint64_t>(nd) << (k * bits);
    }
    dst[w] = out;
  }
}

void row_scale(uint64_t* r, uint32_t c, const RowLayout& L) {
  if (c == 1) return;
  const uint32_t dpw = L.f.digits_per_word, bits = L.f.bits;
  const uint64_t digit_mask = (uint64_t(1) << bits) - 1;
  for (uint32_t w = 0; w < L.words; ++w) {
    uint64_t v = r[w];
    if (!v) continue;
    uint64_t out = 0;
    for (uint32_t k = 0; k < dpw; ++k) {
      uint32_t d = static_cast<uint32_t>((v >> (k * bits)) & digit_mask);
      out |= static_cast<uint64_t>(L.f.mul(c, d)) << (k * bits);
    }
    r[w] = out;
  }
}

int row_cmp(const uint64_t* a, const uint64_t* b, const RowLayout& L) {
  for (uint32_t w = L.words; w-- > 0;) {
    if (a[w] != b[w]) return a[w] < b[w] ? -1 : 1;
  }
  return 0;
}

uint64_t* RowMat::append_zero_row() {
  data_.resize(data_.size() + L_.words, 0);
  return data_.data() + static_cast<size_t>(nrows_++) * L_.words;
}

void RowMat::append_row(const uint64_t* r, const RowLayout& src) {
  if (src.cols > L_.cols && row_top(r, src) >= static_cast<int>(L_.cols))
    throw std::invalid_argument("RowMat::append_row: row does not fit");
  uint64_t* dst = append_zero_row();
  std::memcpy(dst, r, std::min(src.words, L_.words) * sizeof(uint64_t));
}

void RowMat::rref() {
  // forward pass: reduce each row against the current pivot rows
  std::vector<int> piv_of_row;
  std::vector<uint32_t> kept;
  for (uint32_t i = 0; i < nrows_; ++i) {
    uint64_t* r = row(i);
    for (;;) {
      int p = row_pivot(r, L_);
      if (p < 0) break;
      bool reduced = false;
      for (size_t j = 0; j < kept.size(); ++j) {
        if (piv_of_row[j] == p) {
          row_submul(r, row(kept[j]), row_get(r, L_, static_cast<uint32_t>(p)), L_);
          reduced = true;
          break;
        }
      }
      if (!reduced) {
        row_scale(r, L_.f.inv(row_get(r, L_, static_cast<uint32_t>(p))), L_);
        kept.push_back(i);
        piv_of_row.push_back(p);
        break;
      }
    }
  }
  // compact to the kept rows, sorted by pivot ascending
  std::vector<size_t> order(kept.size());
  for (size_t j = 0; j < kept.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return piv_of_row[a] < piv_of_row[b]; });
  std::vector<uint64_t> out(kept.size() * L_.words);
  for (size_t j = 0; j < order.size(); ++j)
    std::memcpy(out.data() + j * L_.words, row(kept[order[j]]), L_.words * sizeof(uint64_t));
  data_ = std::move(out);
  nrows_ = static_cast<uint32_t>(kept.size());
  // backward pass: clear entries above each pivot, largest pivot first
  for (uint32_t i = nrows_; i-- > 0;) {
    for (uint32_t j = i + 1; j < nrows_; ++j) {
      int p = pivot_of(j);
      uint32_t c = row_get(row(i), L_, static_cast<uint32_t>(p));
      if (c) row_submul(row(i), row(j), c, L_);
    }
  }
}

void RowMat::reduce(uint64_t* r) const {
  for (uint32_t j = 0; j < nrows_; ++j) {
    int p = pivot_of(j);
    uint32_t c = row_get(r, L_, static_cast<uint32_t>(p));
    if (c) row_submul(r, row(j), c, L_);
  }
}

bool RowMat::spans(const uint64_t* r) const {
  std::vector<uint64_t> tmp(r, r + L_.words);
  reduce(tmp.data());
  return row_is_zero(tmp.data(), L_);
}

}  // namespace finmon
