#include "finmon/ordmset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace finmon {

Multiset Multiset::single(const mpz_class& id, uint64_t mult) {
  Multiset a;
  if (mult > 0) a.entries.emplace_back(id, mult);
  return a;
}

CnfOrdinal phi(const Multiset& a) {
  CnfOrdinal o;
  o.terms = a.entries;
  return o;
}

int cnf_compare(const CnfOrdinal& a, const CnfOrdinal& b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a.terms[i].first, b.terms[i].first);
    if (c != 0) return c;
    if (a.terms[i].second != b.terms[i].second)
      return a.terms[i].second < b.terms[i].second ? -1 : 1;
  }
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

uint64_t v(const Multiset& a) {
  uint64_t total = 0;
  for (const auto& [id, m] : a.entries) total += m;
  return total;
}

mpz_class grade(const Multiset& a) {
  mpz_class g = 0;
  for (const auto& [id, m] : a.entries) g += (id + 1) * static_cast<unsigned long>(m);
  return g;
}

Multiset disjoint_union(const Multiset& a, const Multiset& b) {
  Multiset out;
  size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first > b.entries[j].first)) {
      out.entries.push_back(a.entries[i++]);
    } else if (i >= a.entries.size() || b.entries[j].first > a.entries[i].first) {
      out.entries.push_back(b.entries[j++]);
    } else {
      out.entries.emplace_back(a.entries[i].first, a.entries[i].second + b.entries[j].second);
      ++i, ++j;
    }
  }
  return out;
}

bool submultiset(const Multiset& a, const Multiset& b) {
  size_t j = 0;
  for (const auto& [id, m] : a.entries) {
    while (j < b.entries.size() && b.entries[j].first > id) ++j;
    if (j >= b.entries.size() || b.entries[j].first != id || b.entries[j].second < m)
      return false;
  }
  return true;
}

std::vector<Multiset> proper_submultisets_v2(const Multiset& a) {
  std::vector<Multiset> out;
  std::vector<uint64_t> pick(a.entries.size(), 0);
  for (;;) {
    // advance the multiplicity odometer
    size_t i = 0;
    while (i < pick.size() && pick[i] == a.entries[i].second) pick[i++] = 0;
    if (i == pick.size()) break;
    ++pick[i];
    Multiset b;
    uint64_t total = 0;
    bool full = true;
    for (size_t e = 0; e < pick.size(); ++e) {
      if (pick[e]) {
        b.entries.emplace_back(a.entries[e].first, pick[e]);
        total += pick[e];
      }
      if (pick[e] != a.entries[e].second) full = false;
    }
    if (full || total < 2) continue;
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [](const Multiset& x, const Multiset& y) {
    return cnf_compare(phi(x), phi(y)) < 0;
  });
  return out;
}

namespace {

// Options (m, c) for splitting grade g into a top part m (<= maxp) with
// multiplicity c and a remainder with parts < m, in phi-ascending order:
// m ascending, then c ascending. Feasible iff the remainder is zero or can
// use parts >= 1 (m >= 2). Call with m == 0 for the first option.
bool next_option(uint64_t g, uint64_t maxp, uint64_t& m, uint64_t& c) {
  uint64_t mm = m == 0 ? 1 : m;
  uint64_t cc = m == 0 ? 1 : c + 1;
  for (; mm <= std::min(g, maxp); ++mm, cc = 1) {
    for (; cc * mm <= g; ++cc) {
      if (g - cc * mm == 0 || mm >= 2) {
        m = mm;
        c = cc;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

ScheduleCursor::ScheduleCursor() { first_partition(); rebuild_current(); }

void ScheduleCursor::first_partition() {
  // first in phi order: all parts equal to 1, i.e. {0^grade}
  stack_.clear();
  stack_.push_back({grade_, grade_, 1, grade_});
}

bool ScheduleCursor::step_partition() {
  while (!stack_.empty()) {
    Frame f = stack_.back();
    stack_.pop_back();
    if (next_option(f.g, f.maxp, f.m, f.c)) {
      stack_.push_back(f);
      uint64_t r = f.g - f.c * f.m;
      if (r > 0) stack_.push_back({r, f.m - 1, 1, r});
      return true;
    }
  }
  return false;
}

void ScheduleCursor::advance() {
  ++k_;
  for (;;) {
    if (!step_partition()) {
      ++grade_;
      first_partition();
    }
    uint64_t parts = 0;
    for (const auto& f : stack_) parts += f.c;
    if (parts >= 2) break;  // skip the single-part partition {grade}
  }
  rebuild_current();
}

void ScheduleCursor::rebuild_current() {
  cur_.entries.clear();
  for (const auto& f : stack_) cur_.entries.emplace_back(f.m - 1, f.c);
}

Multiset schedule_candidate(uint64_t k) {
  ScheduleCursor cur;
  for (uint64_t i = 0; i < k; ++i) cur.advance();
  return cur.current();
}

std::string format_multiset(const Multiset& a) {
  std::string out = "{";
  for (size_t i = 0; i < a.entries.size(); ++i) {
    if (i) out += ", ";
    out += a.entries[i].first.get_str();
    if (a.entries[i].second != 1) out += "^" + std::to_string(a.entries[i].second);
  }
  return out + "}";
}

Multiset parse_multiset(const std::string& text) {
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_nat = [&]() -> std::string {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw std::invalid_argument("multiset syntax: expected a number");
    return text.substr(start, pos - start);
  };
  skip_ws();
  if (pos >= text.size() || text[pos] != '{')
    throw std::invalid_argument("multiset syntax: expected '{'");
  ++pos;
  std::map<mpz_class, uint64_t> acc;
  skip_ws();
  if (pos < text.size() && text[pos] == '}') {
    ++pos;
  } else {
    for (;;) {
      skip_ws();
      mpz_class id(read_nat());
      uint64_t mult = 1;
      skip_ws();
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        skip_ws();
        mult = std::stoull(read_nat());
        if (mult == 0) throw std::invalid_argument("multiset syntax: zero multiplicity");
      }
      acc[id] += mult;
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        break;
      }
      throw std::invalid_argument("multiset syntax: expected ',' or '}'");
    }
  }
  skip_ws();
  if (pos != text.size()) throw std::invalid_argument("multiset syntax: trailing input");
  Multiset out;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) out.entries.emplace_back(it->first, it->second);
  return out;
}

}  // namespace finmon
