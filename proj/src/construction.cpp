#include "finmon/construction.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "finmon/successor.hpp"

namespace finmon {

namespace {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t hash_bytes(const uint8_t* data, size_t len) {
  uint64_t h = 0x51'7c'c1'b7'27'22'0a'95ull ^ len;
  size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    uint64_t w;
    std::memcpy(&w, data + i, 8);
    h = splitmix64(h ^ w);
  }
  if (i < len) {
    uint64_t w = 0;
    std::memcpy(&w, data + i, len - i);
    h = splitmix64(h ^ w);
  }
  return h;
}

void append_uleb(std::vector<uint8_t>& out, uint64_t x) {
  do {
    uint8_t b = x & 0x7f;
    x >>= 7;
    if (x) b |= 0x80;
    out.push_back(b);
  } while (x);
}

uint64_t read_uleb(const uint8_t* data, size_t len, size_t& pos) {
  uint64_t x = 0;
  int shift = 0;
  for (;;) {
    if (pos >= len) throw std::logic_error("packed multiset truncated");
    uint8_t b = data[pos++];
    x |= static_cast<uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return x;
    shift += 7;
  }
}

// Incrementally maintained RREF over GF(p), split into weight-1 rows
// (a bitmask of their pivot columns) and dense rows. The chosen subspaces
// of the construction are overwhelmingly spans of unit vectors plus a few
// dense rows, so this keeps the per-step merge near-linear.
class MutableRref {
 public:
  MutableRref(const FieldPrime& f, uint32_t cols)
      : L_(f, cols), unit_((cols + 63) / 64, 0), dpiv_((cols + 63) / 64, 0),
        bit_(f.p == 2) {}

  const RowLayout& layout() const { return L_; }
  uint32_t dim() const { return n_unit_ + static_cast<uint32_t>(dense_.size()); }
  bool unit(uint32_t q) const { return (unit_[q >> 6] >> (q & 63)) & 1; }

  void add_unit(uint32_t q) {
    if (unit(q)) return;
    if ((dpiv_[q >> 6] >> (q & 63)) & 1) {
      // q is already a dense pivot; fall back to the generic path
      std::vector<uint64_t> r(L_.words, 0);
      row_set(r.data(), L_, q, 1);
      add_reduced(std::move(r));
      return;
    }
    unit_[q >> 6] |= uint64_t(1) << (q & 63);
    ++n_unit_;
    // back-substitution: clear column q everywhere else
    for (auto& r : dense_) row_set(r.data(), L_, q, 0);
  }

  // Merge a whole bitmask of unit pivots at once (the common bulk of a
  // child's rows). The span is order-independent, so the word-parallel
  // merge leaves the represented subspace identical to unit-by-unit adds.
  void add_units_mask(const uint64_t* mask, size_t mwords) {
    for (size_t w = 0; w < mwords && w < unit_.size(); ++w) {
      uint64_t bits;
      uint64_t done = 0;  // bits already folded in via the generic path
      for (;;) {
        bits = mask[w] & ~unit_[w] & ~done;
        uint64_t conf = bits & dpiv_[w];
        if (!conf) break;
        // resolving one conflict can create new dense pivots, so re-derive
        // the pending bits each round rather than batching the conflicts
        uint32_t b = static_cast<uint32_t>(std::countr_zero(conf));
        add_unit(static_cast<uint32_t>((w << 6) + b));
        done |= uint64_t{1} << b;
      }
      if (!bits) continue;
      unit_[w] |= bits;
      n_unit_ += std::popcount(bits);
      if (bit_) {
        for (auto& r : dense_) r[w] &= ~bits;
      } else {
        uint64_t b = bits;
        while (b) {
          uint32_t q = static_cast<uint32_t>((w << 6) + std::countr_zero(b));
          b &= b - 1;
          for (auto& r : dense_) row_set(r.data(), L_, q, 0);
        }
      }
    }
  }

  void add_row(const uint64_t* row, const RowLayout& src) {
    std::vector<uint64_t> r(L_.words, 0);
    std::memcpy(r.data(), row, src.words * sizeof(uint64_t));
    add_reduced(std::move(r));
  }

  // Emit rows in pivot order into a RowMat of this layout.
  Subspace to_subspace() const {
    RowMat m(L_);
    size_t di = 0;
    for (uint32_t q = 0; q < L_.cols; ++q) {
      while (di < dense_.size() && dense_piv_[di] < static_cast<int>(q))
        m.append_row(dense_[di++].data(), L_);
      if (unit(q)) row_set(m.append_zero_row(), L_, q, 1);
    }
    while (di < dense_.size()) m.append_row(dense_[di++].data(), L_);
    return Subspace::from_rref(m);
  }

 private:
  void add_reduced(std::vector<uint64_t> r) {
    // reduce against unit rows: zero their pivot digits
    if (bit_) {
      for (uint32_t w = 0; w < unit_.size(); ++w) r[w] &= ~unit_[w];
    } else {
      for (uint32_t w = 0; w < unit_.size(); ++w) {
        uint64_t bits = unit_[w];
        while (bits) {
          uint32_t q = (w << 6) + std::countr_zero(bits);
          bits &= bits - 1;
          if (q < L_.cols) row_set(r.data(), L_, q, 0);
        }
      }
    }
    for (size_t i = 0; i < dense_.size(); ++i) {
      uint32_t c = row_get(r.data(), L_, dense_piv_[i]);
      if (c) row_submul(r.data(), dense_[i].data(), c, L_);
    }
    int h = row_pivot(r.data(), L_);
    if (h < 0) return;
    uint32_t lead = row_get(r.data(), L_, h);
    if (lead != 1) row_scale(r.data(), L_.f.inv(lead), L_);
    // back-substitution into existing dense rows
    for (auto& d : dense_) {
      uint32_t c = row_get(d.data(), L_, h);
      if (c) row_submul(d.data(), r.data(), c, L_);
    }
    if (row_top(r.data(), L_) == h) {
      // weight-1 row: it belongs in the unit mask
      unit_[h >> 6] |= uint64_t(1) << (h & 63);
      ++n_unit_;
      return;
    }
    auto it = std::upper_bound(dense_piv_.begin(), dense_piv_.end(), h);
    size_t idx = it - dense_piv_.begin();
    dense_piv_.insert(it, h);
    dpiv_[h >> 6] |= uint64_t(1) << (h & 63);
    dense_.insert(dense_.begin() + idx, std::move(r));
  }

  RowLayout L_;
  std::vector<uint64_t> unit_;
  std::vector<uint64_t> dpiv_;  // dense pivot columns as a bitmask
  uint32_t n_unit_ = 0;
  bool bit_;
  std::vector<std::vector<uint64_t>> dense_;  // sorted by pivot
  std::vector<int> dense_piv_;
};

}  // namespace

ConstructionState::ConstructionState(const FieldPrime& f, uint64_t log_limit,
                                     std::string cache_dir)
    : f_(f), enum_(f, 1u << 12, std::move(cache_dir)), wm_(f), log_limit_(log_limit),
      scratch_elem_(f) {}

std::string ConstructionState::packed_key(const Multiset& a) {
  std::vector<uint8_t> buf;
  for (const auto& [id, mult] : a.entries) {
    if (!id.fits_ulong_p())
      throw std::invalid_argument("multiset id too large for the construction domain");
    append_uleb(buf, id.get_ui());
    append_uleb(buf, mult);
  }
  return std::string(buf.begin(), buf.end());
}

uint64_t ConstructionState::pack_key(const Multiset& a) {
  uint64_t off = key_pool_.size();
  std::string k = packed_key(a);
  key_pool_.insert(key_pool_.end(), k.begin(), k.end());
  return off;
}

Multiset ConstructionState::unpack_key(uint64_t off, uint32_t len) const {
  Multiset a;
  size_t pos = 0;
  const uint8_t* data = key_pool_.data() + off;
  while (pos < len) {
    uint64_t id = read_uleb(data, len, pos);
    uint64_t mult = read_uleb(data, len, pos);
    a.entries.emplace_back(mpz_class(static_cast<unsigned long>(id)), mult);
  }
  return a;
}

namespace {
constexpr uint32_t kEmptySlot = 0xffffffffu;
}

void ConstructionState::dom_grow() {
  size_t cap = dom_hash_.empty() ? (size_t(1) << 16) : dom_hash_.size() * 2;
  std::vector<uint64_t> nh(cap, 0);
  std::vector<uint32_t> ns(cap, kEmptySlot);
  size_t mask = cap - 1;
  for (size_t i = 0; i < dom_hash_.size(); ++i) {
    if (dom_slot_[i] == kEmptySlot) continue;
    size_t j = dom_hash_[i] & mask;
    while (ns[j] != kEmptySlot) j = (j + 1) & mask;
    nh[j] = dom_hash_[i];
    ns[j] = dom_slot_[i];
  }
  dom_hash_.swap(nh);
  dom_slot_.swap(ns);
}

void ConstructionState::dom_insert(uint64_t h, uint32_t idx) {
  if ((dom_used_ + 1) * 10 >= dom_hash_.size() * 6) dom_grow();  // load factor < 0.6
  size_t mask = dom_hash_.size() - 1;
  size_t j = h & mask;
  while (dom_slot_[j] != kEmptySlot) j = (j + 1) & mask;
  dom_hash_[j] = h;
  dom_slot_[j] = idx;
  ++dom_used_;
}

std::optional<uint32_t> ConstructionState::find_dom(const Multiset& a) const {
  std::vector<uint8_t>& k = key_scratch_;
  k.clear();
  for (const auto& [id, mult] : a.entries) {
    if (!id.fits_ulong_p())
      throw std::invalid_argument("multiset id too large for the construction domain");
    append_uleb(k, id.get_ui());
    append_uleb(k, mult);
  }
  return find_packed();
}

std::optional<uint32_t> ConstructionState::find_dom_less(const Multiset& a, size_t drop) const {
  std::vector<uint8_t>& k = key_scratch_;
  k.clear();
  for (size_t i = 0; i < a.entries.size(); ++i) {
    const auto& [id, mult] = a.entries[i];
    uint64_t m = mult - (i == drop ? 1 : 0);
    if (m == 0) continue;
    if (!id.fits_ulong_p())
      throw std::invalid_argument("multiset id too large for the construction domain");
    append_uleb(k, id.get_ui());
    append_uleb(k, m);
  }
  return find_packed();
}

std::optional<uint32_t> ConstructionState::find_packed() const {
  if (dom_hash_.empty()) return std::nullopt;
  const std::vector<uint8_t>& k = key_scratch_;
  uint64_t h = hash_bytes(k.data(), k.size());
  size_t mask = dom_hash_.size() - 1;
  for (size_t j = h & mask; dom_slot_[j] != kEmptySlot; j = (j + 1) & mask) {
    if (dom_hash_[j] != h) continue;
    uint32_t idx = dom_slot_[j];
    const DomEntry& e = entries_[idx];
    if (e.key_len == k.size() &&
        std::memcmp(key_pool_.data() + e.key_off, k.data(), k.size()) == 0)
      return idx;
  }
  return std::nullopt;
}

uint32_t ConstructionState::store_entry(const Multiset& a, const Subspace& w) {
  DomEntry e;
  e.amb = w.ambient_bound();
  e.dim = w.dim();
  const RowLayout& L = w.layout();
  uint32_t mask_words = (e.amb + 63) / 64;
  e.unit_off = word_pool_.size();
  word_pool_.resize(word_pool_.size() + mask_words, 0);
  std::vector<uint32_t> dense_rows;
  for (uint32_t i = 0; i < e.dim; ++i) {
    const uint64_t* r = w.row(i);
    int piv = row_pivot(r, L);
    if (row_top(r, L) == piv && row_get(r, L, piv) == 1) {
      word_pool_[e.unit_off + (piv >> 6)] |= uint64_t(1) << (piv & 63);
      ++stats_.unit_rows_stored;
    } else {
      dense_rows.push_back(i);
    }
  }
  e.n_dense = dense_rows.size();
  e.dense_off = word_pool_.size();
  for (uint32_t i : dense_rows) {
    size_t at = word_pool_.size();
    word_pool_.resize(at + L.words);
    std::memcpy(word_pool_.data() + at, w.row(i), L.words * sizeof(uint64_t));
    ++stats_.dense_rows_stored;
  }
  std::string k = packed_key(a);
  e.key_off = pack_key(a);
  e.key_len = k.size();
  uint32_t idx = entries_.size();
  entries_.push_back(e);
  dom_insert(hash_bytes(reinterpret_cast<const uint8_t*>(k.data()), k.size()), idx);
  auto [h1, h2] = w.hash128();
  image_[h1].emplace_back(h2, idx);
  if (auto sid = enum_.stream_index(w)) image_small_ids_.insert(*sid);
  stats_.max_dim = std::max(stats_.max_dim, e.dim);
  stats_.max_amb = std::max(stats_.max_amb, e.amb);
  return idx;
}

Subspace ConstructionState::entry_subspace(const DomEntry& e) const {
  RowLayout L(f_, e.amb);
  RowMat m(L);
  uint32_t mask_words = (e.amb + 63) / 64;
  size_t di = 0;
  auto unit = [&](uint32_t q) {
    return (word_pool_[e.unit_off + (q >> 6)] >> (q & 63)) & 1;
  };
  auto dense_piv = [&](size_t i) {
    return row_pivot(word_pool_.data() + e.dense_off + i * L.words, L);
  };
  for (uint32_t q = 0; q < e.amb; ++q) {
    while (di < e.n_dense && dense_piv(di) < static_cast<int>(q))
      m.append_row(word_pool_.data() + e.dense_off + (di++) * L.words, L);
    if (unit(q)) row_set(m.append_zero_row(), L, q, 1);
  }
  while (di < e.n_dense) m.append_row(word_pool_.data() + e.dense_off + (di++) * L.words, L);
  return Subspace::from_rref(m);
}

void ConstructionState::overwrite_dom_value(const Multiset& a, const Subspace& w) {
  auto idx = find_dom(a);
  if (!idx) throw std::invalid_argument("overwrite_dom_value: multiset not in dom");
  DomEntry& e = entries_[*idx];
  // unlink the old subspace from the image maps
  Subspace old = entry_subspace(e);
  auto [oh1, oh2] = old.hash128();
  auto& bucket = image_[oh1];
  for (size_t i = 0; i < bucket.size(); ++i)
    if (bucket[i].first == oh2 && bucket[i].second == *idx) {
      bucket.erase(bucket.begin() + i);
      break;
    }
  if (auto sid = enum_.stream_index(old)) image_small_ids_.erase(*sid);
  // store the replacement rows (old pool words are abandoned)
  e.amb = w.ambient_bound();
  e.dim = w.dim();
  const RowLayout& L = w.layout();
  uint32_t mask_words = (e.amb + 63) / 64;
  e.unit_off = word_pool_.size();
  word_pool_.resize(word_pool_.size() + mask_words, 0);
  std::vector<uint32_t> dense_rows;
  for (uint32_t i = 0; i < e.dim; ++i) {
    const uint64_t* r = w.row(i);
    int piv = row_pivot(r, L);
    if (row_top(r, L) == piv && row_get(r, L, piv) == 1)
      word_pool_[e.unit_off + (piv >> 6)] |= uint64_t(1) << (piv & 63);
    else
      dense_rows.push_back(i);
  }
  e.n_dense = dense_rows.size();
  e.dense_off = word_pool_.size();
  for (uint32_t i : dense_rows) {
    size_t at = word_pool_.size();
    word_pool_.resize(at + L.words);
    std::memcpy(word_pool_.data() + at, w.row(i), L.words * sizeof(uint64_t));
  }
  auto [h1, h2] = w.hash128();
  image_[h1].emplace_back(h2, *idx);
  if (auto sid = enum_.stream_index(w)) image_small_ids_.insert(*sid);
}

std::optional<Subspace> ConstructionState::dom_lookup(const Multiset& a) const {
  auto idx = find_dom(a);
  if (!idx) return std::nullopt;
  return entry_subspace(entries_[*idx]);
}

std::optional<Multiset> ConstructionState::image_lookup(const Subspace& w) const {
  if (w.is_zero()) return std::nullopt;
  auto [h1, h2] = w.hash128();
  auto it = image_.find(h1);
  if (it == image_.end()) return std::nullopt;
  for (const auto& [hh, idx] : it->second) {
    if (hh != h2) continue;
    const DomEntry& e = entries_[idx];
    if (e.amb == w.ambient_bound() && e.dim == w.dim() && entry_subspace(e) == w)
      return unpack_key(e.key_off, e.key_len);
  }
  return std::nullopt;
}

bool ConstructionState::id_is_composite_so_far(const mpz_class& id) const {
  if (id.fits_ulong_p()) {
    unsigned long v = id.get_ui();
    if (v < enum_.stream_capacity()) return image_small_ids_.count(v) > 0;
  }
  return image_lookup(enum_.unrank(id)).has_value();
}

const Subspace& ConstructionState::element_subspace(const mpz_class& id) {
  if (id.fits_ulong_p() && id.get_ui() < enum_.stream_capacity())
    return enum_.at(id.get_ui());
  if (id != scratch_elem_id_) {
    scratch_elem_ = enum_.unrank(id);
    scratch_elem_id_ = id;
  }
  return scratch_elem_;
}

Subspace ConstructionState::lower_bound_span(const Multiset& a) {
  // W' must contain unrank(u) for every u in A and g(B) for every proper
  // submultiset B with v(B) >= 2. Because g(B) contains g(B') whenever
  // B' is a proper submultiset of B (condition (1) of B's own step) and
  // unrank(u) is contained in g(B) whenever u lies in B (condition (2)),
  // the span of the maximal children g(A - u) alone is the same subspace.
  // For v(A) = 2 there are no children and W' is the sum of the elements.
  uint32_t cols = 0;
  std::vector<uint32_t> child_idx;
  if (v(a) >= 3) {
    for (size_t i = 0; i < a.entries.size(); ++i) {
      auto idx = find_dom_less(a, i);
      if (!idx)
        throw std::logic_error("construction invariant violated: child multiset not in dom");
      child_idx.push_back(*idx);
      cols = std::max(cols, entries_[*idx].amb);
    }
  } else {
    for (const auto& [id, mult] : a.entries)
      cols = std::max(cols, element_subspace(id).ambient_bound());
  }
  MutableRref acc(f_, cols);
  if (v(a) >= 3) {
    for (uint32_t idx : child_idx) {
      const DomEntry& e = entries_[idx];
      RowLayout L(f_, e.amb);
      acc.add_units_mask(word_pool_.data() + e.unit_off, (e.amb + 63) / 64);
      for (uint32_t i = 0; i < e.n_dense; ++i)
        acc.add_row(word_pool_.data() + e.dense_off + i * L.words, L);
    }
  } else {
    for (const auto& [id, mult] : a.entries) {
      const Subspace& u = element_subspace(id);
      for (uint32_t i = 0; i < u.dim(); ++i) acc.add_row(u.row(i), u.layout());
    }
  }
  return acc.to_subspace();
}

Subspace ConstructionState::choose_w(const Subspace& lower_bound) const {
  return least_superspace_after(lower_bound, wm_.is_zero() ? nullptr : &wm_);
}

void ConstructionState::step() {
  const Multiset& a = sched_.current();  // valid until the advance below
  uint64_t idx = stats_.steps;
  bool skip = false;
  for (const auto& [id, mult] : a.entries)
    if (id_is_composite_so_far(id)) {
      skip = true;
      break;
    }
  bool logging = idx < log_limit_;
  Subspace logged_w(f_);
  if (!skip) {
    // raise the watermark past every id mentioned by the candidate
    const Subspace& top = element_subspace(a.entries.front().first);
    if (wm_.is_zero() || wm_.compare_position(top) < 0) wm_ = top;
    Subspace lower = lower_bound_span(a);
    Subspace chosen = choose_w(lower);
    store_entry(a, chosen);
    if (logging) logged_w = chosen;
    wm_ = std::move(chosen);
    ++stats_.processed;
  } else {
    ++stats_.skipped;
  }
  if (logging) {
    StepRecord rec;
    rec.index = idx;
    rec.candidate = a;
    rec.processed = !skip;
    rec.w = std::move(logged_w);
    rec.watermark = wm_;
    log_.push_back(std::move(rec));
  }
  ++stats_.steps;
  sched_.advance();
}

Classify ConstructionState::classify(const Subspace& u) {
  if (u.is_zero()) return Classify::Zero;
  if (image_lookup(u)) return Classify::Q;
  while (wm_.is_zero() || wm_.compare_position(u) < 0) step();
  return image_lookup(u) ? Classify::Q : Classify::P;
}

Multiset ConstructionState::f_inverse(const Subspace& u) {
  if (u.is_zero()) return Multiset{};
  if (classify(u) == Classify::P) return Multiset::single(enum_.rank(u));
  return *image_lookup(u);
}

Subspace ConstructionState::f_apply(const Multiset& a) {
  for (const auto& [id, mult] : a.entries) {
    Subspace u = element_subspace(id);
    if (classify(u) != Classify::P)
      throw std::invalid_argument("f_apply: id " + id.get_str() + " is composite");
  }
  if (a.empty()) return Subspace(f_);
  if (v(a) == 1) return element_subspace(a.entries.front().first);
  mpz_class g = grade(a);
  for (;;) {
    if (auto w = dom_lookup(a)) return *w;
    if (grade(sched_.current()) > g)
      throw std::logic_error("f_apply: candidate passed in the schedule without entering dom");
    step();
  }
}

Subspace ConstructionState::star(const Subspace& f, const Subspace& g) {
  if (f.field() != f_ || g.field() != f_)
    throw std::invalid_argument("star: field mismatch");
  return f_apply(disjoint_union(f_inverse(f), f_inverse(g)));
}

std::pair<Subspace, uint64_t> theorem_a_op(ConstructionState& state,
                                           const std::pair<Subspace, uint64_t>& x,
                                           const std::pair<Subspace, uint64_t>& y) {
  return {state.star(x.first, y.first), x.second + y.second};
}

}  // namespace finmon
