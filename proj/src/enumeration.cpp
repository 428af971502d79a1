#include "finmon/enumeration.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace finmon {

namespace {

struct GbKey {
  uint32_t n, k, p;
  bool operator<(const GbKey& o) const {
    return std::tie(n, k, p) < std::tie(o.n, o.k, o.p);
  }
};

std::mutex g_gb_mu;
std::map<GbKey, mpz_class> g_gb_cache;

}  // namespace

mpz_class gauss_binom(uint32_t n, uint32_t k, uint32_t p) {
  if (k > n) return 0;
  if (k == 0 || k == n) return 1;
  std::lock_guard<std::mutex> lock(g_gb_mu);
  auto it = g_gb_cache.find({n, k, p});
  if (it != g_gb_cache.end()) return it->second;
  // prod_{i=0}^{k-1} (p^{n-i} - 1) / (p^{i+1} - 1), exact at every step
  mpz_class num = 1, pz = p;
  for (uint32_t i = 0; i < k; ++i) {
    mpz_class a, b;
    mpz_pow_ui(a.get_mpz_t(), pz.get_mpz_t(), n - i);
    a -= 1;
    mpz_pow_ui(b.get_mpz_t(), pz.get_mpz_t(), i + 1);
    b -= 1;
    num *= a;
    mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), b.get_mpz_t());
  }
  g_gb_cache[{n, k, p}] = num;
  return num;
}

mpz_class galois_number(uint32_t n, uint32_t p) {
  mpz_class total = 0;
  for (uint32_t k = 0; k <= n; ++k) total += gauss_binom(n, k, p);
  return total;
}

// ---------------------------------------------------------------------------
// Closed-form machinery: count RREF matrices (d rows, within n columns) whose
// row-serial sequence is lexicographically smaller than a target's, by a
// column DP over the first diverging row. Also powers greedy unranking.
// ---------------------------------------------------------------------------

namespace {

enum Cmp { TIGHT = 0, LESS = 1 };
enum Mode { OPEN = 0, PLACED = 1 };

struct DpSpec {
  // compare target for row i (rank path); null for pure extension counting
  const uint64_t* u_row = nullptr;
  const RowLayout* u_layout = nullptr;
  // fixed digits of row i for columns >= c_low (unrank path); -1 = unused
  const std::vector<int>* fixed = nullptr;
  uint32_t c_low = 0;
};

// Count matrices extending a fixed row prefix, decomposed over row i's
// digits and the pivot placements of the m rows after it. Zbits marks the
// support union of the prefix rows; fpiv is the last prefix pivot.
class ColumnDp {
 public:
  explicit ColumnDp(const FieldPrime& f) : f_(f) {}

  mpz_class run(uint32_t n, const std::vector<uint64_t>& zbits, int fpiv, uint32_t m,
                const DpSpec& spec, Cmp initial_cmp) {
    const uint32_t p = f_.p;
    const size_t nstates = static_cast<size_t>(m + 1) * 2 * 2;
    cur_.assign(nstates, mpz_class(0));
    nxt_.assign(nstates, mpz_class(0));
    auto at = [m](std::vector<mpz_class>& v, uint32_t t, int mode, int cmp) -> mpz_class& {
      return v[(static_cast<size_t>(t) * 2 + mode) * 2 + cmp];
    };
    at(cur_, 0, OPEN, initial_cmp) = 1;

    int upiv = -1;
    if (spec.u_row) upiv = row_pivot(spec.u_row, *spec.u_layout);

    for (int ci = static_cast<int>(n) - 1; ci >= 0; --ci) {
      uint32_t c = static_cast<uint32_t>(ci);
      bool adm = ci > fpiv && !((zbits[c >> 6] >> (c & 63)) & 1);
      uint32_t ud = 0;
      if (spec.u_row && c < spec.u_layout->cols) ud = row_get(spec.u_row, *spec.u_layout, c);
      int fixed_v = -1;
      if (spec.fixed && c >= spec.c_low) fixed_v = (*spec.fixed)[c];

      for (auto& x : nxt_) x = 0;
      for (uint32_t t = 0; t <= m; ++t) {
        for (int cmp = 0; cmp < 2; ++cmp) {
          // OPEN: row i's pivot lies at or below this column
          mpz_class& x = at(cur_, t, OPEN, cmp);
          if (x != 0) {
            // (a) pivot of a later row at c; row i's digit is 0 here
            if (adm && t < m && (fixed_v < 0 || fixed_v == 0)) {
              int cmp2 = cmp;
              if (spec.u_row && cmp == TIGHT && ud > 0) cmp2 = LESS;
              mpz_class w = x;
              mul_pow_p(w, n - 1 - c - t);
              at(nxt_, t + 1, OPEN, cmp2) += w;
            }
            // (b) row i's pivot at c: digit 1, zeros below
            if (adm && t == m && (fixed_v < 0 || fixed_v == 1)) {
              if (spec.u_row && cmp == TIGHT) {
                if (ud >= 2 || (ud == 1 && upiv < ci)) at(nxt_, t, PLACED, LESS) += x;
                // ud == 1 && upiv == ci would make row i equal: excluded
              } else if (!spec.u_row || cmp == LESS) {
                at(nxt_, t, PLACED, cmp) += x;
              }
            }
            // (c) plain digit of row i at c (pivot strictly below)
            if (spec.u_row && cmp == TIGHT) {
              at(nxt_, t, OPEN, TIGHT) += x;             // digit == ud
              if (ud > 0) at(nxt_, t, OPEN, LESS) += x * ud;  // digit < ud
            } else if (fixed_v >= 0) {
              at(nxt_, t, OPEN, cmp) += x;
            } else {
              at(nxt_, t, OPEN, cmp) += x * p;
            }
          }
          // PLACED: everything below row i's pivot is zero for row i
          mpz_class& y = at(cur_, t, PLACED, cmp);
          if (y != 0 && (fixed_v < 0 || fixed_v == 0)) at(nxt_, t, PLACED, cmp) += y;
        }
      }
      cur_.swap(nxt_);
    }
    mpz_class total = at(cur_, m, PLACED, spec.u_row ? LESS : TIGHT);
    if (spec.u_row) return total;
    return at(cur_, m, PLACED, TIGHT) + at(cur_, m, PLACED, LESS);
  }

 private:
  void mul_pow_p(mpz_class& x, uint32_t e) {
    if (e == 0) return;
    if (f_.p == 2) {
      mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), e);
    } else {
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), f_.p, e);
      x *= pw;
    }
  }

  FieldPrime f_;
  std::vector<mpz_class> cur_, nxt_;
};

void add_support(std::vector<uint64_t>& zbits, const uint64_t* row, const RowLayout& L) {
  for (uint32_t c = 0; c < L.cols; ++c)
    if (row_get(row, L, c)) zbits[c >> 6] |= uint64_t(1) << (c & 63);
}

// L(n, U): matrices with dim(U) rows fitting in n columns, lex-less than U.
mpz_class count_lex_less(const FieldPrime& f, uint32_t n, const Subspace& u) {
  if (n == 0 || u.dim() > n) return 0;
  const RowLayout& uL = u.layout();
  std::vector<uint64_t> zbits((n + 63) / 64, 0);
  int fpiv = -1;
  int prefix_top = -1;
  ColumnDp dp(f);
  mpz_class total = 0;
  for (uint32_t i = 0; i < u.dim(); ++i) {
    if (prefix_top <= static_cast<int>(n)) {  // prefix rows all fit in n columns
      DpSpec spec;
      spec.u_row = u.row(i);
      spec.u_layout = &uL;
      Cmp init = row_top(u.row(i), uL) >= static_cast<int>(n) ? LESS : TIGHT;
      total += dp.run(n, zbits, fpiv, u.dim() - 1 - i, spec, init);
    }
    add_support(zbits, u.row(i), uL);
    fpiv = row_pivot(u.row(i), uL);
    prefix_top = std::max(prefix_top, row_top(u.row(i), uL) + 1);
  }
  return total;
}

}  // namespace

mpz_class Enumeration::rank_closed_form(const Subspace& u) const {
  if (u.is_zero()) throw std::domain_error("rank of the zero subspace");
  if (u.field() != f_) throw std::invalid_argument("rank: field mismatch");
  uint32_t n0 = u.ambient_bound(), d0 = u.dim();
  mpz_class total = galois_number(n0 - 1, f_.p) - 1;
  for (uint32_t d = 1; d < d0; ++d)
    total += gauss_binom(n0, d, f_.p) - gauss_binom(n0 - 1, d, f_.p);
  total += count_lex_less(f_, n0, u) - count_lex_less(f_, n0 - 1, u);
  return total;
}

Subspace Enumeration::unrank_closed_form(const mpz_class& id) const {
  if (id < 0) throw std::domain_error("unrank: negative id");
  // locate the block (ambient bound) and the dimension within it
  uint32_t n0 = 1;
  while (galois_number(n0, f_.p) - 1 <= id) ++n0;
  mpz_class rem = id - (galois_number(n0 - 1, f_.p) - 1);
  uint32_t d0 = 0;
  for (uint32_t d = 1; d <= n0; ++d) {
    mpz_class cnt = gauss_binom(n0, d, f_.p) - gauss_binom(n0 - 1, d, f_.p);
    if (rem < cnt) {
      d0 = d;
      break;
    }
    rem -= cnt;
  }
  if (d0 == 0) throw std::logic_error("unrank: dimension scan failed");

  // greedy digit selection, counting lexicographic extensions
  RowLayout L(f_, n0);
  RowMat prefix(L);
  std::vector<uint64_t> zbits((n0 + 63) / 64, 0);
  int fpiv = -1;
  bool uses_last = false;  // some fixed digit at column n0-1 is nonzero
  ColumnDp dp(f_);
  for (uint32_t i = 0; i < d0; ++i) {
    std::vector<int> fixed(n0, -1);
    uint32_t m = d0 - 1 - i;
    for (int c = static_cast<int>(n0) - 1; c >= 0; --c) {
      uint32_t v = 0;
      for (;;) {
        fixed[c] = static_cast<int>(v);
        DpSpec spec;
        spec.fixed = &fixed;
        spec.c_low = static_cast<uint32_t>(c);
        mpz_class cnt = dp.run(n0, zbits, fpiv, m, spec, TIGHT);
        if (!uses_last && !(c == static_cast<int>(n0) - 1 && v != 0))
          cnt -= dp.run(n0 - 1, zbits, fpiv, m, spec, TIGHT);
        if (rem < cnt) break;
        rem -= cnt;
        if (++v >= f_.p) throw std::logic_error("unrank: digit scan failed");
      }
      if (c == static_cast<int>(n0) - 1 && v != 0) uses_last = true;
    }
    uint64_t* r = prefix.append_zero_row();
    for (uint32_t c = 0; c < n0; ++c)
      if (fixed[c] > 0) row_set(r, L, c, static_cast<uint32_t>(fixed[c]));
    add_support(zbits, r, L);
    fpiv = row_pivot(r, L);
    if (fpiv < 0) throw std::logic_error("unrank: produced a zero row");
  }
  if (rem != 0) throw std::logic_error("unrank: leftover offset");
  return Subspace::from_rref(prefix);
}

// ---------------------------------------------------------------------------
// Streaming table of small blocks
// ---------------------------------------------------------------------------

Enumeration::Enumeration(const FieldPrime& f, uint64_t stream_limit, std::string cache_dir)
    : f_(f), stream_limit_(stream_limit), cache_dir_(std::move(cache_dir)) {}

uint32_t Enumeration::stream_block_limit() const {
  uint32_t n = 0;
  mpz_class lim(static_cast<unsigned long>(stream_limit_));
  while (galois_number(n + 1, f_.p) - 1 <= lim) ++n;
  return n;
}

uint64_t Enumeration::stream_capacity() const {
  mpz_class c = galois_number(stream_block_limit(), f_.p) - 1;
  return c.get_ui();
}

void Enumeration::build_block(uint32_t n) const {
  std::vector<Subspace> blk;
  if (!load_block_cache(n, blk)) {
    RowLayout L(f_, n);
    std::vector<uint32_t> pivots;
    RowMat mat(L);
    // enumerate RREF matrices by pivot set, then free digits
    std::vector<Subspace> all;
    std::vector<uint32_t> freecols;
    auto emit = [&](auto&& self, uint32_t row_idx) -> void {
      if (row_idx == pivots.size()) {
        Subspace s = Subspace::from_rref(mat);
        if (!s.is_zero() && s.ambient_bound() == n) all.push_back(std::move(s));
        return;
      }
      // free columns for this row: above its pivot, not a pivot column
      freecols.clear();
      for (uint32_t c = pivots[row_idx] + 1; c < n; ++c)
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) freecols.push_back(c);
      uint64_t* r = mat.row(row_idx);
      std::vector<uint32_t> fc = freecols;
      auto fill = [&](auto&& rec, size_t k) -> void {
        if (k == fc.size()) {
          self(self, row_idx + 1);
          return;
        }
        for (uint32_t v = 0; v < f_.p; ++v) {
          row_set(r, L, fc[k], v);
          rec(rec, k + 1);
        }
        row_set(r, L, fc[k], 0);
      };
      fill(fill, 0);
    };
    auto choose = [&](auto&& self, uint32_t start, uint32_t need) -> void {
      if (need == 0) {
        mat.clear();
        for (uint32_t i = 0; i < pivots.size(); ++i) {
          uint64_t* r = mat.append_zero_row();
          row_set(r, L, pivots[i], 1);
        }
        emit(emit, 0);
        return;
      }
      for (uint32_t c = start; c + need <= n; ++c) {
        pivots.push_back(c);
        self(self, c + 1, need - 1);
        pivots.pop_back();
      }
    };
    for (uint32_t d = 1; d <= n; ++d) {
      pivots.clear();
      choose(choose, 0, d);
    }
    std::sort(all.begin(), all.end(),
              [](const Subspace& a, const Subspace& b) { return a.compare_position(b) < 0; });
    blk = std::move(all);
    store_block_cache(n, blk);
  }
  for (auto& s : blk) {
    auto [h1, h2] = s.hash128();
    index_[h1 ^ (h2 * 0x9e3779b97f4a7c15ull)].push_back(table_.size());
    table_.push_back(std::move(s));
  }
  blocks_built_ = n;
}

void Enumeration::ensure_block(uint32_t n) const {
  while (blocks_built_ < n) build_block(blocks_built_ + 1);
}

const Subspace& Enumeration::at(uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  while (table_.size() <= id) {
    if (blocks_built_ >= stream_block_limit())
      throw std::out_of_range("Enumeration::at: id beyond streaming table limit");
    build_block(blocks_built_ + 1);
  }
  return table_[id];
}

std::optional<uint64_t> Enumeration::stream_index(const Subspace& u) const {
  if (u.is_zero()) return std::nullopt;
  if (u.ambient_bound() > stream_block_limit()) return std::nullopt;
  std::lock_guard<std::mutex> lock(mu_);
  ensure_block(u.ambient_bound());
  auto [h1, h2] = u.hash128();
  auto it = index_.find(h1 ^ (h2 * 0x9e3779b97f4a7c15ull));
  if (it == index_.end()) return std::nullopt;
  for (uint64_t id : it->second)
    if (table_[id] == u) return id;
  return std::nullopt;
}

mpz_class Enumeration::rank(const Subspace& u) const {
  if (u.is_zero()) throw std::domain_error("rank of the zero subspace");
  if (!u.is_zero() && u.ambient_bound() <= stream_block_limit()) {
    auto idx = stream_index(u);
    if (idx) return mpz_class(static_cast<unsigned long>(*idx));
    throw std::logic_error("rank: subspace missing from its block");
  }
  return rank_closed_form(u);
}

Subspace Enumeration::unrank(const mpz_class& id) const {
  if (id < 0) throw std::domain_error("unrank: negative id");
  if (id < static_cast<long>(std::min<uint64_t>(stream_capacity(), INT64_MAX)))
    return at(id.get_ui());
  return unrank_closed_form(id);
}

std::vector<mpz_class> Enumeration::block_sizes(uint32_t up_to_n) const {
  std::vector<mpz_class> out;
  for (uint32_t n = 1; n <= up_to_n; ++n)
    out.push_back(galois_number(n, f_.p) - galois_number(n - 1, f_.p));
  return out;
}

// ---------------------------------------------------------------------------
// Optional on-disk block cache (purely a performance cache)
// ---------------------------------------------------------------------------

bool Enumeration::load_block_cache(uint32_t n, std::vector<Subspace>& out) const {
  if (cache_dir_.empty()) return false;
  std::filesystem::path path =
      std::filesystem::path(cache_dir_) / ("block_p" + std::to_string(f_.p) + "_n" + std::to_string(n) + ".bin");
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  RowLayout L(f_, n);
  for (uint64_t i = 0; i < count && in; ++i) {
    uint32_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    RowMat m(L);
    for (uint32_t r = 0; r < dim; ++r)
      in.read(reinterpret_cast<char*>(m.append_zero_row()), L.words * sizeof(uint64_t));
    if (!in) return false;
    out.push_back(Subspace::from_rref(m));
  }
  return in && out.size() == count;
}

void Enumeration::store_block_cache(uint32_t n, const std::vector<Subspace>& blk) const {
  if (cache_dir_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cache_dir_, ec);
  std::filesystem::path path =
      std::filesystem::path(cache_dir_) / ("block_p" + std::to_string(f_.p) + "_n" + std::to_string(n) + ".bin");
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) return;
  uint64_t count = blk.size();
  outf.write(reinterpret_cast<const char*>(&count), sizeof(count));
  RowLayout L(f_, n);
  std::vector<uint64_t> buf(L.words);
  for (const auto& s : blk) {
    uint32_t dim = s.dim();
    outf.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (uint32_t r = 0; r < dim; ++r) {
      std::fill(buf.begin(), buf.end(), 0);
      std::memcpy(buf.data(), s.row(r), s.layout().words * sizeof(uint64_t));
      outf.write(reinterpret_cast<const char*>(buf.data()), L.words * sizeof(uint64_t));
    }
  }
}

}  // namespace finmon
