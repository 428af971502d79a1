#include "finmon/field.hpp"

#include <bit>
#include <stdexcept>

namespace finmon {

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldPrime::FieldPrime(uint32_t prime) : p(prime) {
  if (!is_prime(prime)) throw std::invalid_argument("FieldPrime: p must be prime");
  bits = std::bit_width(prime - 1);
  if (bits == 0) bits = 1;
  digits_per_word = 64 / bits;
}

uint32_t FieldPrime::inv(uint32_t a) const {
  if (a == 0) throw std::domain_error("FieldPrime::inv(0)");
  // extended Euclid on (a, p)
  int64_t t = 0, newt = 1, r = p, newr = a % p;
  while (newr != 0) {
    int64_t q = r / newr;
    int64_t tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (t < 0) t += p;
  return static_cast<uint32_t>(t);
}

}  // namespace finmon
