#include "finmon/successor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace finmon {

namespace {

using Row = std::vector<uint64_t>;

inline bool getbit(const uint64_t* z, uint32_t c) { return (z[c >> 6] >> (c & 63)) & 1; }
inline void setbit(uint64_t* z, uint32_t c) { z[c >> 6] |= uint64_t(1) << (c & 63); }
inline void clearbit(uint64_t* z, uint32_t c) { z[c >> 6] &= ~(uint64_t(1) << (c & 63)); }

// Search state while fixing the rows of the candidate superspace in pivot
// order. Stored flat so that copies along the search path are cheap:
//   fpiv    last fixed pivot (-1 initially)
//   z       support union of the fixed rows (1 bit per column)
//   rpiv    pivot columns of the residual rows (1 bit per column)
//   R       residual rows (the target reduced modulo the fixed rows),
//           mutually reduced, monic, sorted by pivot, nR rows contiguous
//   ell     rows still to fix
//   covered column n-1 already nonzero somewhere in the final matrix
struct State {
  int fpiv = -1;
  std::vector<uint64_t> z, rpiv;
  // borrowed view into a buffer owned by an enclosing search frame: rows are
  // immutable once published, the most common transition (fixing a row below
  // every residual pivot) leaves the residual matrix untouched, and dropping
  // the first residual is a pointer bump
  const uint64_t* Rp = nullptr;
  uint32_t nR = 0;
  uint32_t ell = 0;
  bool covered = false;
};

struct Engine {
  FieldPrime f;
  uint32_t n;
  RowLayout L;
  size_t zw;                        // bitset words
  std::vector<uint64_t> colmask;    // bits 0..n-1
  mutable std::vector<uint64_t> scratch_;
  mutable std::vector<uint64_t> scratch_s_;
  mutable std::deque<State> depth_pool_;  // reusable per-depth search states
  mutable std::deque<Row> depth_rbuf_;    // per-depth residual-matrix storage
  mutable std::deque<Row> depth_ubuf_;    // per-depth row scratch
  // least_row working buffers (least_row never nests inside itself)
  mutable Row lr_slocal_, lr_base_, lr_b2_, lr_cand_, lr_tmp_rbuf_;
  mutable std::vector<uint64_t> lr_allowed_, lr_costly_, lr_free_, lr_rpiv2_;
  mutable State lr_tmp_;
  // min_completion working set (never nested); the two residual buffers
  // alternate so the one being written never backs the current state
  mutable State mc_st_, mc_next_;
  mutable Row mc_u_, mc_buf_[2];

  State& depth_state(size_t i) const {
    while (depth_pool_.size() <= i) depth_pool_.emplace_back();
    return depth_pool_[i];
  }
  Row& depth_rbuf(size_t i) const {
    while (depth_rbuf_.size() <= i) depth_rbuf_.emplace_back();
    return depth_rbuf_[i];
  }
  Row& depth_ubuf(size_t i) const {
    while (depth_ubuf_.size() <= i) depth_ubuf_.emplace_back();
    return depth_ubuf_[i];
  }

  bool bitrow;  // GF(2): a packed row is exactly a column bitmask

  Engine(const FieldPrime& fld, uint32_t ncols)
      : f(fld), n(ncols), L(fld, ncols), zw((ncols + 63) / 64), colmask(zw, 0),
        bitrow(fld.p == 2 && L.words == zw) {
    for (uint32_t c = 0; c < n; ++c) setbit(colmask.data(), c);
  }

  const uint64_t* row(const State& st, uint32_t i) const { return st.Rp + i * L.words; }

  void add_support(uint64_t* z, const uint64_t* r) const {
    if (bitrow) {
      for (size_t w = 0; w < zw; ++w) z[w] |= r[w];
      return;
    }
    for (uint32_t c = 0; c < n; ++c)
      if (row_get(r, L, c)) setbit(z, c);
  }

  // u has a nonzero digit in a column of the mask (mask also indexes columns)
  bool hits_mask(const uint64_t* u, const uint64_t* mask) const {
    if (bitrow) {
      for (size_t w = 0; w < zw; ++w)
        if (u[w] & mask[w]) return true;
      return false;
    }
    for (size_t w = 0; w < zw; ++w) {
      uint64_t m = mask[w];
      while (m) {
        uint32_t c = (w << 6) + std::countr_zero(m);
        m &= m - 1;
        if (row_get(u, L, c)) return true;
      }
    }
    return false;
  }

  bool feasible(const State& st) const {
    if (st.nR > st.ell) return false;
    uint32_t eps = st.ell - st.nR;
    // free columns: > fpiv, not in a fixed-row support, not a residual pivot
    uint32_t avail = 0;
    for (size_t w = 0; w < zw; ++w) {
      uint64_t m = colmask[w] & ~st.z[w] & ~st.rpiv[w];
      if (static_cast<int>(w) == st.fpiv >> 6 && st.fpiv >= 0)
        m &= ~((uint64_t(2) << (st.fpiv & 63)) - 1);
      else if (static_cast<int>(w) < st.fpiv >> 6)
        m = 0;
      avail += std::popcount(m);
    }
    if (avail < eps) return false;
    if (!st.covered) {
      // covered is an invariant over fixed AND residual rows, so a state
      // with covered == false has no residual touching column n-1: the last
      // column must still be coverable by a free remaining row
      bool avail_last = !getbit(st.z.data(), n - 1) && !getbit(st.rpiv.data(), n - 1) &&
                        static_cast<int>(n) - 1 > st.fpiv;
      if (!(eps >= 1 && avail_last)) return false;
    }
    return true;
  }

  // rbuf: storage for out's residual matrix when it must be rebuilt; must not
  // back st (call sites give each search frame its own buffer)
  bool apply_row(const State& st, const uint64_t* u, State& out, Row& rbuf) const {
    int q = row_pivot(u, L);
    if (q <= st.fpiv || getbit(st.z.data(), q)) return false;
    int cstar = st.nR == 0 ? static_cast<int>(n) : row_pivot(row(st, 0), L);
    if (q > cstar) return false;
    if (q < cstar) {
      // u must avoid every residual pivot column
      if (hits_mask(u, st.rpiv.data())) return false;
      out = st;
    } else {
      // u must avoid the pivots of the residual rows after the first
      scratch_.assign(st.rpiv.begin(), st.rpiv.end());
      clearbit(scratch_.data(), static_cast<uint32_t>(q));
      if (hits_mask(u, scratch_.data())) return false;
      out.fpiv = st.fpiv;
      out.z = st.z;
      out.rpiv = st.rpiv;
      out.covered = st.covered;
      out.ell = st.ell;
      // rho' = rho - u; both monic at q
      scratch_.assign(L.words, 0);
      std::memcpy(scratch_.data(), row(st, 0), L.words * sizeof(uint64_t));
      row_submul(scratch_.data(), u, 1, L);
      clearbit(out.rpiv.data(), q);
      int h = row_pivot(scratch_.data(), L);
      if (h >= 0) {
        // h becomes the pivot of a later row: every fixed row (u included)
        // must be zero there, i.e. h outside z union supp(u)
        if (getbit(st.z.data(), h) || row_get(u, L, h)) return false;
        uint32_t lead = row_get(scratch_.data(), L, h);
        if (lead != 1) row_scale(scratch_.data(), f.inv(lead), L);
        // reduce the remaining residuals by the new row, keep pivot order
        rbuf.resize(static_cast<size_t>(st.nR) * L.words);
        out.nR = st.nR;
        bool placed = false;
        uint32_t at = 0;
        for (uint32_t i = 1; i < st.nR; ++i) {
          int pi = row_pivot(row(st, i), L);
          if (!placed && h < pi) {
            std::memcpy(rbuf.data() + (at++) * L.words, scratch_.data(),
                        L.words * sizeof(uint64_t));
            placed = true;
          }
          uint64_t* dst = rbuf.data() + (at++) * L.words;
          std::memcpy(dst, row(st, i), L.words * sizeof(uint64_t));
          uint32_t c = row_get(dst, L, h);
          if (c) row_submul(dst, scratch_.data(), c, L);
        }
        if (!placed)
          std::memcpy(rbuf.data() + at * L.words, scratch_.data(), L.words * sizeof(uint64_t));
        out.Rp = rbuf.data();
        setbit(out.rpiv.data(), h);
      } else {
        out.Rp = st.Rp + L.words;  // drop the first residual in place
        out.nR = st.nR - 1;
      }
    }
    out.fpiv = q;
    add_support(out.z.data(), u);
    out.ell = st.ell - 1;
    out.covered = st.covered || row_get(u, L, n - 1) != 0;
    // when u sits below every residual pivot the residuals are untouched, so
    // their coverage of column n-1 is already reflected in st.covered
    if (!out.covered && q == cstar) {
      for (uint32_t i = 0; i < out.nR && !out.covered; ++i)
        if (row_get(row(out, i), L, n - 1)) out.covered = true;
    }
    return feasible(out);
  }

  // v with minimal serial such that v > s (s == nullptr: no lower bound),
  // v agrees with `base` outside `allowed`, free on `allowed` columns, and
  // uses at most `budget` nonzero digits on `costly` columns (a subset of
  // `allowed`; consumption elsewhere is prepaid by the caller). base must be
  // zero on allowed columns.
  bool next_with_base(const uint64_t* s, const Row& base, const std::vector<uint64_t>& allowed,
                      const std::vector<uint64_t>& costly, uint32_t budget, Row& v) const {
    if (!s) {
      v = base;  // minimal choice: zeros on all allowed columns
      return true;
    }
    if (s == v.data()) {  // callers step in place; keep s readable while v is rewritten
      scratch_s_.assign(v.begin(), v.end());
      s = scratch_s_.data();
    }
    auto emit = [&](int c, uint32_t digit) {
      std::fill(v.begin(), v.end(), 0);
      for (int cc = c + 1; cc < static_cast<int>(n); ++cc)
        row_set(v.data(), L, cc, row_get(s, L, cc));
      row_set(v.data(), L, c, digit);
      for (int cc = 0; cc < c; ++cc) row_set(v.data(), L, cc, row_get(base.data(), L, cc));
    };
    int esc_col = -1;
    uint32_t esc_digit = 0;
    int brk = -1;
    uint32_t wt = 0;  // costly digits of the followed prefix of s
    for (int c = static_cast<int>(n) - 1; c >= 0; --c) {
      uint32_t sd = row_get(s, L, c);
      if (!getbit(allowed.data(), c)) {
        uint32_t bd = row_get(base.data(), L, c);
        if (bd > sd) {
          emit(c, bd);
          return true;
        }
        if (bd < sd) {
          brk = c;
          break;
        }
      } else {
        uint32_t cost = getbit(costly.data(), c) ? 1 : 0;
        if (sd + 1 < f.p && wt + cost <= budget) {
          esc_col = c;  // lowest affordable escape seen so far
          esc_digit = sd + 1;
        }
        if (sd) {
          wt += cost;
          if (wt > budget) {  // cannot keep following s through this column
            brk = c;
            break;
          }
        }
      }
    }
    if (esc_col <= brk) return false;
    emit(esc_col, esc_digit);
    return true;
  }

  // Pivot columns of residual rows i >= from.
  // out = src restricted to columns strictly above q (column bitsets)
  void mask_above(const std::vector<uint64_t>& src, int q, std::vector<uint64_t>& out) const {
    for (size_t w = 0; w < zw; ++w) {
      uint64_t m = src[w];
      if (static_cast<int>(w << 6) <= q) {
        if (static_cast<int>((w + 1) << 6) <= q + 1) {
          out[w] = 0;
          continue;
        }
        m &= ~((uint64_t(2) << (q & 63)) - 1);
      }
      out[w] = m;
    }
  }

  bool least_row(const State& st, const uint64_t* s, Row& best) const {
    if (s) {  // callers pass best's own buffer as the lower bound
      lr_slocal_.assign(s, s + L.words);
      s = lr_slocal_.data();
    }
    int cstar = st.nR == 0 ? static_cast<int>(n) - 1 : row_pivot(row(st, 0), L);
    int maxq = std::min(cstar, static_cast<int>(n) - 1);
    bool have = false;
    Row& base = lr_base_;
    std::vector<uint64_t>&allowed = lr_allowed_, &costly = lr_costly_, &freecols = lr_free_;
    allowed.assign(zw, 0);
    costly.assign(zw, 0);
    freecols.assign(zw, 0);
    lr_cand_.assign(L.words, 0);
    State& tmp = lr_tmp_;
    auto try_family = [&](const Row& b, const std::vector<uint64_t>& allow,
                          const std::vector<uint64_t>& cost, uint32_t budget) {
      Row& cand = lr_cand_;
      bool ok = next_with_base(s, b, allow, cost, budget, cand);
      while (ok) {
        if (have && row_cmp(cand.data(), best.data(), L) >= 0) return;
        if (apply_row(st, cand.data(), tmp, lr_tmp_rbuf_)) {
          best = cand;
          have = true;
          return;
        }
        ok = next_with_base(cand.data(), b, allow, cost, budget, cand);
      }
    };
    // A family's candidates all pass the applicability filters by
    // construction; the scan budget makes the avail/coverage clauses of
    // feasible() hold too, so the first candidate scanned is accepted. The
    // per-family setup below computes that budget exactly.
    const bool tail_ok = st.nR + 1 <= st.ell;  // room for a non-matching row
    uint32_t eps2 = tail_ok ? st.ell - 1 - st.nR : 0;
    // residual coverage of column n-1 is already folded into st.covered
    // (see feasible); when covered is false no residual can supply it
    const bool res_last_all = false;
    auto family_with_coverage = [&](int q, const Row& b, std::vector<uint64_t>& allow,
                                    const std::vector<uint64_t>& freemask, bool guaranteed,
                                    uint32_t cost_base) {
      // freemask: free columns (outside z and the post-step residual pivots);
      // only those above q count towards the budget
      uint32_t avail = 0;
      for (size_t w = 0; w < zw; ++w) {
        uint64_t m = freemask[w];
        if (static_cast<int>(w << 6) <= q) {
          if (static_cast<int>((w + 1) << 6) <= q + 1) continue;
          m &= ~((uint64_t(2) << (q & 63)) - 1);
        }
        avail += std::popcount(m);
      }
      if (avail < eps2 + cost_base) return;
      uint32_t budget = avail - eps2 - cost_base;
      for (size_t w = 0; w < zw; ++w) costly[w] = allow[w] & freemask[w];
      if (!guaranteed && !st.covered) {
        if (getbit(allow.data(), n - 1) && eps2 == 0) {
          // the last row slot is spoken for: u itself must cover column n-1
          if (budget == 0) return;  // column n-1 is free, so covering costs 1
          clearbit(allow.data(), n - 1);
          lr_b2_ = b;
          for (uint32_t val = 1; val < f.p; ++val) {
            row_set(lr_b2_.data(), L, n - 1, val);
            try_family(lr_b2_, allow, costly, budget - 1);
          }
          setbit(allow.data(), n - 1);
          return;
        }
        uint32_t bd = row_get(b.data(), L, n - 1);
        if (!getbit(allow.data(), n - 1) && bd == 0 && eps2 == 0) return;
      }
      try_family(b, allow, costly, budget);
    };
    for (int q = st.fpiv + 1; q <= maxq; ++q) {
      if (getbit(st.z.data(), q)) continue;
      if (st.nR != 0 && q == cstar) {
        const uint64_t* rho = row(st, 0);
        // u = rho exactly: a single candidate; apply_row decides feasibility
        {
          bool in_range = (!s || row_cmp(rho, s, L) > 0) &&
                          (!have || row_cmp(rho, best.data(), L) < 0);
          if (in_range && apply_row(st, rho, tmp, lr_tmp_rbuf_)) {
            best.assign(rho, rho + L.words);
            have = true;
          }
        }
        // u agrees with rho below h, is zero at h (rho_h != 0, h outside z),
        // and is free above h outside the remaining residual pivots; the
        // difference rho - u becomes a residual with pivot h
        if (tail_ok) {
          // pivots of the residual rows after the first
          std::vector<uint64_t>& rpiv2 = lr_rpiv2_;
          rpiv2.assign(st.rpiv.begin(), st.rpiv.end());
          clearbit(rpiv2.data(), static_cast<uint32_t>(q));
          // residual coverage of n-1 is folded into st.covered, which is
          // all family_with_coverage consults when it matters
          const bool guaranteed = false;
          for (int h = q + 1; h < static_cast<int>(n); ++h) {
            if (!row_get(rho, L, h) || getbit(st.z.data(), h)) continue;
            base.assign(L.words, 0);
            uint32_t cost_base = 0;
            if (bitrow) {
              for (size_t w = 0; w < zw; ++w) base[w] = rho[w];
              mask_above(base, h - 1, costly);  // scratch use: bits >= h
              for (size_t w = 0; w < zw; ++w) base[w] &= ~costly[w];
            } else {
              for (int c = 0; c < h; ++c) row_set(base.data(), L, c, row_get(rho, L, c));
            }
            mask_above(colmask, h, allowed);
            for (size_t w = 0; w < zw; ++w) {
              allowed[w] &= ~rpiv2[w];
              freecols[w] = colmask[w] & ~st.z[w] & ~rpiv2[w];
            }
            clearbit(freecols.data(), h);  // h is the new residual pivot
            if (bitrow) {
              for (size_t w = 0; w < zw; ++w)
                cost_base += std::popcount(base[w] & freecols[w]);
              // base sits below h; subtract its (absent) part at or below q
              for (int c = st.fpiv + 1; c <= q; ++c)
                if (row_get(base.data(), L, c) && getbit(freecols.data(), c)) --cost_base;
            } else {
              for (int c = q + 1; c < h; ++c)
                if (row_get(base.data(), L, c) && getbit(freecols.data(), c)) ++cost_base;
            }
            family_with_coverage(q, base, allowed, freecols, guaranteed, cost_base);
          }
        }
      } else if (tail_ok) {
        base.assign(L.words, 0);
        row_set(base.data(), L, q, 1);
        mask_above(colmask, q, allowed);
        for (size_t w = 0; w < zw; ++w) {
          allowed[w] &= ~st.rpiv[w];
          freecols[w] = colmask[w] & ~st.z[w] & ~st.rpiv[w];
        }
        family_with_coverage(q, base, allowed, freecols, res_last_all, 0);
      }
    }
    return have;
  }

  bool min_completion(const State& start, std::vector<Row>& rows) const {
    State& st = mc_st_;
    st = start;
    Row& u = mc_u_;
    u.assign(L.words, 0);
    State& next = mc_next_;
    int k = 0;  // st only ever references the last-rebuilt buffer, never this one
    while (st.ell > 0) {
      if (!least_row(st, nullptr, u)) return false;
      if (!apply_row(st, u.data(), next, mc_buf_[k])) return false;
      if (next.Rp == mc_buf_[k].data()) k ^= 1;
      std::swap(st, next);
      rows.push_back(u);
    }
    return st.nR == 0;
  }

  // rows come out deepest-first; the caller reverses once at the end
  bool bounded(const State& st, const std::vector<Row>& brows, size_t i,
               std::vector<Row>& rows) const {
    if (st.ell == 0) return false;  // all rows tight: equal to the bound
    const Row& bt = brows[i];
    State& next = depth_state(i);  // reused across calls; deeper levels use slots > i
    Row& rb = depth_rbuf(i);
    if (apply_row(st, bt.data(), next, rb)) {
      if (bounded(next, brows, i + 1, rows)) {
        rows.push_back(bt);
        return true;
      }
    }
    Row& u = depth_ubuf(i);
    u.assign(L.words, 0);
    bool ok = least_row(st, bt.data(), u);
    while (ok) {
      if (apply_row(st, u.data(), next, rb)) {
        std::vector<Row> rest;
        if (min_completion(next, rest)) {
          rows.clear();
          for (size_t j = rest.size(); j-- > 0;) rows.push_back(std::move(rest[j]));
          rows.push_back(std::move(u));
          return true;
        }
      }
      ok = least_row(st, u.data(), u);
    }
    return false;
  }
};

bool succ_in_section(const FieldPrime& f, uint32_t n, uint32_t d, const Subspace& w,
                     const Subspace* bound, std::vector<Row>& rows) {
  uint32_t m = w.is_zero() ? 0 : w.ambient_bound();
  uint32_t dw = w.dim();
  if (!(dw <= d && d <= n && n >= m && (n == m || d > dw))) return false;
  // consecutive queries usually share the field and the ambient section
  static thread_local std::unique_ptr<Engine> cached;
  if (!cached || cached->f.p != f.p || cached->n != n) cached = std::make_unique<Engine>(f, n);
  Engine& eng = *cached;
  State st;
  st.z.assign(eng.zw, 0);
  st.rpiv.assign(eng.zw, 0);
  st.ell = d;
  std::vector<uint64_t> R0(static_cast<size_t>(dw) * eng.L.words, 0);
  st.nR = dw;
  for (uint32_t i = 0; i < dw; ++i) {
    uint64_t* r = R0.data() + static_cast<size_t>(i) * eng.L.words;
    std::memcpy(r, w.row(i), w.layout().words * sizeof(uint64_t));
    if (row_get(r, eng.L, n - 1)) st.covered = true;
    setbit(st.rpiv.data(), static_cast<uint32_t>(row_pivot(r, eng.L)));
  }
  st.Rp = R0.data();
  if (!eng.feasible(st)) return false;
  if (!bound) return eng.min_completion(st, rows);
  std::vector<Row> brows;
  for (uint32_t i = 0; i < bound->dim(); ++i) {
    Row r(eng.L.words, 0);
    std::memcpy(r.data(), bound->row(i), bound->layout().words * sizeof(uint64_t));
    brows.push_back(std::move(r));
  }
  if (!eng.bounded(st, brows, 0, rows)) return false;
  std::reverse(rows.begin(), rows.end());
  return true;
}

}  // namespace

Subspace least_superspace_after(const Subspace& w, const Subspace* bound) {
  const FieldPrime& f = w.field();
  if (bound && bound->is_zero()) bound = nullptr;
  uint32_t ambw = w.is_zero() ? 0 : w.ambient_bound();
  uint32_t n, d;
  bool first = false;
  uint32_t ambb = 0;
  if (bound) {
    if (bound->field() != f) throw std::invalid_argument("least_superspace_after: field mismatch");
    n = bound->ambient_bound();
    d = bound->dim();
    first = true;
    ambb = n;
  } else {
    n = std::max(ambw, 1u);
    d = 1;
  }
  uint32_t stop_n = std::max(ambw, ambb) + w.dim() + 3;
  std::vector<Row> rows;
  for (;;) {
    const Subspace* b = first ? bound : nullptr;
    first = false;
    rows.clear();
    if (succ_in_section(f, n, d, w, b, rows)) {
      RowMat m(RowLayout(f, n));
      for (const auto& r : rows) m.append_row(r.data(), RowLayout(f, n));
      return Subspace::from_rref(m);
    }
    if (n > stop_n && d == n)
      throw std::logic_error("least_superspace_after: no superspace found");
    if (++d > n) {
      ++n;
      d = 1;
    }
  }
}

}  // namespace finmon
