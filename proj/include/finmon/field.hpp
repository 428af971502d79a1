#pragma once

#include <cstdint>

namespace finmon {

// Prime field GF(p). Row vectors over GF(p) are packed into 64-bit words
// with `bits` bits per digit; digits never straddle a word boundary
// (each word holds digits_per_word digits in its low bits, the remaining
// high bits stay zero). For p = 2 this degenerates to plain bitmasks.
struct FieldPrime {
  uint32_t p = 2;
  uint32_t bits = 1;             // bits per packed digit
  uint32_t digits_per_word = 64;

  FieldPrime() = default;
  explicit FieldPrime(uint32_t prime);

  uint32_t add(uint32_t a, uint32_t b) const {
    uint32_t s = a + b;
    return s >= p ? s - p : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p - b; }
  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p - a; }
  uint32_t mul(uint32_t a, uint32_t b) const {
    return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % p);
  }
  uint32_t inv(uint32_t a) const;  // multiplicative inverse, a != 0

  bool operator==(const FieldPrime&) const = default;
};

bool is_prime(uint32_t n);

}  // namespace finmon
