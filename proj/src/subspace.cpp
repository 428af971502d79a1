#include "finmon/subspace.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace finmon {

Vec0 Vec0::make(std::vector<std::pair<uint32_t, uint32_t>> raw, const FieldPrime& f) {
  std::map<uint32_t, uint32_t> acc;
  for (auto& [i, c] : raw) acc[i] = f.add(acc[i], c % f.p);
  Vec0 v;
  for (auto& [i, c] : acc)
    if (c != 0) v.terms.emplace_back(i, c);
  return v;
}

namespace {

void write_vec(uint64_t* r, const RowLayout& L, const Vec0& v) {
  for (auto& [i, c] : v.terms) row_set(r, L, i, c);
}

}  // namespace

Subspace Subspace::span(const std::vector<Vec0>& generators, const FieldPrime& f) {
  uint32_t cols = 0;
  for (const auto& g : generators)
    if (!g.terms.empty()) cols = std::max(cols, g.terms.back().first + 1);
  RowMat m(RowLayout(f, cols));
  for (const auto& g : generators) {
    if (g.terms.empty()) continue;
    write_vec(m.append_zero_row(), m.layout(), g);
  }
  m.rref();
  return from_rref(m);
}

Subspace Subspace::from_rref(const RowMat& m) {
  Subspace s(m.layout().f);
  int amb = -1;
  for (uint32_t i = 0; i < m.rows(); ++i) amb = std::max(amb, row_top(m.row(i), m.layout()));
  if (amb < 0) return s;  // zero subspace
  s.L_ = RowLayout(m.layout().f, static_cast<uint32_t>(amb) + 1);
  s.dim_ = m.rows();
  s.words_.assign(static_cast<size_t>(s.dim_) * s.L_.words, 0);
  for (uint32_t i = 0; i < s.dim_; ++i)
    std::memcpy(s.words_.data() + static_cast<size_t>(i) * s.L_.words, m.row(i),
                s.L_.words * sizeof(uint64_t));
  return s;
}

uint32_t Subspace::ambient_bound() const {
  if (is_zero()) throw std::domain_error("ambient_bound of the zero subspace");
  return L_.cols;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (field() != other.field()) throw std::invalid_argument("sum: field mismatch");
  RowMat m(RowLayout(field(), std::max(L_.cols, other.L_.cols)));
  for (uint32_t i = 0; i < dim_; ++i) m.append_row(row(i), L_);
  for (uint32_t i = 0; i < other.dim_; ++i) m.append_row(other.row(i), other.L_);
  m.rref();
  return from_rref(m);
}

bool Subspace::contains(const Subspace& other) const {
  if (field() != other.field()) throw std::invalid_argument("contains: field mismatch");
  if (other.is_zero()) return true;
  if (is_zero() || other.L_.cols > L_.cols || other.dim_ > dim_) return false;
  RowMat m(L_);
  for (uint32_t i = 0; i < dim_; ++i) m.append_row(row(i), L_);
  std::vector<uint64_t> tmp(L_.words);
  for (uint32_t i = 0; i < other.dim_; ++i) {
    std::fill(tmp.begin(), tmp.end(), 0);
    std::memcpy(tmp.data(), other.row(i), other.L_.words * sizeof(uint64_t));
    m.reduce(tmp.data());
    if (!row_is_zero(tmp.data(), L_)) return false;
  }
  return true;
}

bool Subspace::contains(const Vec0& v) const {
  std::vector<Vec0> g{v};
  Subspace line = Subspace::span(g, field());
  return contains(line);
}

int Subspace::compare_position(const Subspace& other) const {
  if (is_zero() || other.is_zero()) return (is_zero() ? 0 : 1) - (other.is_zero() ? 0 : 1);
  if (L_.cols != other.L_.cols) return L_.cols < other.L_.cols ? -1 : 1;
  if (dim_ != other.dim_) return dim_ < other.dim_ ? -1 : 1;
  for (uint32_t i = 0; i < dim_; ++i) {
    int c = row_cmp(row(i), other.row(i), L_);
    if (c != 0) return c;
  }
  return 0;
}

bool Subspace::operator==(const Subspace& other) const {
  return field() == other.field() && dim_ == other.dim_ && L_.cols == other.L_.cols &&
         words_ == other.words_;
}

namespace {
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace

std::pair<uint64_t, uint64_t> Subspace::hash128() const {
  uint64_t a = splitmix64((static_cast<uint64_t>(field().p) << 32) | L_.cols);
  uint64_t b = splitmix64(a ^ (0x5851f42d4c957f2dull + dim_));
  for (uint64_t w : words_) {
    a = splitmix64(a ^ w);
    b = splitmix64(b + (w * 0x2545f4914f6cdd1dull));
  }
  return {a, b};
}

std::vector<Vec0> Subspace::rows_as_vecs() const {
  std::vector<Vec0> out;
  for (uint32_t i = 0; i < dim_; ++i) {
    Vec0 v;
    for (uint32_t c = 0; c < L_.cols; ++c) {
      uint32_t d = row_get(row(i), L_, c);
      if (d) v.terms.emplace_back(c, d);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string Subspace::format() const {
  if (is_zero()) return "0";
  std::string out;
  auto rows = rows_as_vecs();
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i) out += ";";
    for (size_t t = 0; t < rows[i].terms.size(); ++t) {
      auto [idx, c] = rows[i].terms[t];
      if (t) out += "+";
      if (c != 1) out += std::to_string(c) + "*";
      out += "e" + std::to_string(idx);
    }
  }
  return out;
}

namespace {

Vec0 parse_vec(const std::string& text, const FieldPrime& f) {
  std::vector<std::pair<uint32_t, uint32_t>> terms;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos < text.size() && text[pos] == '0' && pos + 1 >= text.size()) return Vec0{};
  while (pos < text.size()) {
    skip_ws();
    uint64_t coeff = 1;
    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      size_t end;
      coeff = std::stoull(text.substr(pos), &end);
      pos += end;
      skip_ws();
      if (pos >= text.size() || text[pos] != '*')
        throw std::invalid_argument("vector syntax: expected '*' after coefficient");
      ++pos;
      skip_ws();
    }
    if (pos >= text.size() || text[pos] != 'e')
      throw std::invalid_argument("vector syntax: expected 'e<i>' term");
    ++pos;
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw std::invalid_argument("vector syntax: expected coordinate index");
    size_t end;
    uint64_t idx = std::stoull(text.substr(pos), &end);
    pos += end;
    terms.emplace_back(static_cast<uint32_t>(idx), static_cast<uint32_t>(coeff % f.p));
    skip_ws();
    if (pos < text.size()) {
      if (text[pos] != '+') throw std::invalid_argument("vector syntax: expected '+'");
      ++pos;
    }
  }
  return Vec0::make(std::move(terms), f);
}

}  // namespace

Subspace Subspace::parse(const std::string& text, const FieldPrime& f) {
  std::vector<Vec0> gens;
  size_t start = 0;
  while (start <= text.size()) {
    size_t sep = text.find(';', start);
    std::string part = text.substr(start, sep == std::string::npos ? sep : sep - start);
    if (!part.empty()) gens.push_back(parse_vec(part, f));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return span(gens, f);
}

}  // namespace finmon
