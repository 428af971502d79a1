#include "finmon/means.hpp"

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace finmon {

namespace {

std::string point_str(const LatticePoint& t) {
  std::ostringstream os;
  os << '(';
  for (size_t j = 0; j < t.size(); ++j) os << (j ? "," : "") << t[j];
  os << ')';
  return os.str();
}

long inf_norm(const LatticePoint& t) {
  long m = 0;
  for (long x : t) m = std::max(m, std::labs(x));
  return m;
}

bool is_nonzero(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>() != 0.0; }

// Deterministic, order-fixed pairwise reduction over [lo, hi).
Eigen::VectorXd pairwise_sum(uint64_t lo, uint64_t hi,
                             const std::function<Eigen::VectorXd(uint64_t)>& at) {
  if (hi - lo == 1) return at(lo);
  uint64_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, at) + pairwise_sum(mid, hi, at);
}

uint64_t cube_size(long n, uint32_t k) {
  uint64_t side = 2 * static_cast<uint64_t>(n) + 1, total = 1;
  for (uint32_t j = 0; j < k; ++j) {
    if (total > (uint64_t(1) << 40) / side)
      throw std::invalid_argument("cube [-n,n]^k too large to average");
    total *= side;
  }
  return total;
}

LatticePoint cube_point(uint64_t idx, long n, uint32_t k) {
  uint64_t side = 2 * static_cast<uint64_t>(n) + 1;
  LatticePoint t(k);
  for (uint32_t j = 0; j < k; ++j) {
    t[j] = static_cast<long>(idx % side) - n;
    idx /= side;
  }
  return t;
}

template <typename Fn>
void for_cube(long n, uint32_t k, Fn&& body) {
  uint64_t total = cube_size(n, k);
  for (uint64_t idx = 0; idx < total; ++idx) body(cube_point(idx, n, k));
}

void require_rank(const BoundedFn& f, LatticeKind kind, const char* what) {
  if (f.domain.kind != kind) throw std::invalid_argument(std::string(what) + ": wrong domain kind");
}

LatticePoint unit(uint32_t k, uint32_t i, long c = 1) {
  LatticePoint e(k, 0);
  e[i - 1] = c;
  return e;
}

void require_coord(const BoundedFn& f, uint32_t i) {
  if (i < 1 || i > f.domain.k) throw std::invalid_argument("coordinate index out of range");
}

mpz_class det_int(const IntMatrix& m) {
  size_t n = m.size();
  std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n));
  for (size_t r = 0; r < n; ++r) {
    if (m[r].size() != n) throw std::invalid_argument("matrix is not square");
    for (size_t c = 0; c < n; ++c) a[r][c] = m[r][c];
  }
  // fraction-free (Bareiss) elimination
  mpz_class prev = 1;
  int sign = 1;
  for (size_t p = 0; p < n; ++p) {
    size_t piv = p;
    while (piv < n && a[piv][p] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != p) {
      std::swap(a[piv], a[p]);
      sign = -sign;
    }
    for (size_t r = p + 1; r < n; ++r)
      for (size_t c = p + 1; c < n; ++c)
        a[r][c] = (a[r][c] * a[p][p] - a[r][p] * a[p][c]) / prev;
    prev = a[p][p];
  }
  return sign * a[n - 1][n - 1];
}

size_t row_rank(const IntMatrix& m, size_t cols) {
  std::vector<std::vector<mpq_class>> a;
  for (const auto& row : m) {
    if (row.size() != cols) throw std::invalid_argument("ragged matrix");
    a.emplace_back(row.begin(), row.end());
  }
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < a.size(); ++c) {
    size_t piv = rank;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[rank]);
    for (size_t r = rank + 1; r < a.size(); ++r) {
      mpq_class factor = a[r][c] / a[rank][c];
      for (size_t cc = c; cc < cols; ++cc) a[r][cc] -= factor * a[rank][cc];
    }
    ++rank;
  }
  return rank;
}

// 64-bit mix of the seed and the coordinates, for pure pseudo-random values.
uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Eigen::VectorXd BoundedFn::operator()(const LatticePoint& t) const {
  if (!evaluator) throw std::invalid_argument("BoundedFn has no evaluator");
  if (t.size() != domain.k) throw std::invalid_argument("lattice point has wrong rank");
  if (domain.kind == LatticeKind::Nk)
    for (long x : t)
      if (x < 0) throw std::invalid_argument("negative coordinate in N^k domain");
  Eigen::VectorXd v = evaluator(t);
  if (static_cast<uint32_t>(v.size()) != value_dim)
    throw std::logic_error("evaluator returned wrong dimension");
  if (v.lpNorm<Eigen::Infinity>() > sup_bound + 1e-12 * (1.0 + std::fabs(sup_bound)))
    throw std::logic_error("value exceeds declared sup bound at " + point_str(t));
  return v;
}

BoundedFn const_fn(LatticeGroup g, const Eigen::VectorXd& x) {
  BoundedFn f;
  f.domain = g;
  f.value_dim = static_cast<uint32_t>(x.size());
  f.sup_bound = x.lpNorm<Eigen::Infinity>();
  f.evaluator = [x](const LatticePoint&) { return x; };
  return f;
}

BoundedFn point_indicator(LatticeGroup g, LatticePoint t0) {
  if (t0.size() != g.k) throw std::invalid_argument("indicator point has wrong rank");
  BoundedFn f;
  f.domain = g;
  f.value_dim = 1;
  f.sup_bound = 1.0;
  f.evaluator = [t0](const LatticePoint& t) {
    Eigen::VectorXd v(1);
    v[0] = (t == t0) ? 1.0 : 0.0;
    return v;
  };
  return f;
}

BoundedFn slab_indicator(LatticeGroup g, uint32_t i, long c) {
  if (i < 1 || i > g.k) throw std::invalid_argument("coordinate index out of range");
  BoundedFn f;
  f.domain = g;
  f.value_dim = 1;
  f.sup_bound = 1.0;
  f.evaluator = [i, c](const LatticePoint& t) {
    Eigen::VectorXd v(1);
    v[0] = (t[i - 1] == c) ? 1.0 : 0.0;
    return v;
  };
  return f;
}

BoundedFn random_fn(LatticeGroup g, uint64_t seed, long support_radius) {
  BoundedFn f;
  f.domain = g;
  f.value_dim = 1;
  f.sup_bound = 4.0;
  f.evaluator = [seed, support_radius](const LatticePoint& t) {
    Eigen::VectorXd v(1);
    v[0] = 0.0;
    for (long x : t)
      if (std::labs(x) > support_radius) return v;
    uint64_t h = mix64(seed);
    for (long x : t) h = mix64(h ^ static_cast<uint64_t>(x));
    v[0] = static_cast<double>(static_cast<long>(h % 9) - 4);
    return v;
  };
  return f;
}

Eigen::VectorXd folner_mean(const BoundedFn& f, long n) {
  require_rank(f, LatticeKind::Zk, "folner_mean");
  if (n < 0) throw std::invalid_argument("negative box radius");
  uint64_t total = cube_size(n, f.domain.k);
  Eigen::VectorXd sum = pairwise_sum(
      0, total, [&](uint64_t idx) { return f(cube_point(idx, n, f.domain.k)); });
  return sum / static_cast<double>(total);
}

BoundedFn translate(const BoundedFn& f, const LatticePoint& s, Side) {
  if (s.size() != f.domain.k) throw std::invalid_argument("shift has wrong rank");
  BoundedFn g = f;
  g.evaluator = [f, s](const LatticePoint& t) {
    LatticePoint u = t;
    for (size_t j = 0; j < u.size(); ++j) u[j] += s[j];
    return f(u);
  };
  return g;
}

double invariance_defect(const BoundedFn& f, const LatticePoint& s, long n) {
  Eigen::VectorXd a = folner_mean(translate(f, s), n);
  Eigen::VectorXd b = folner_mean(f, n);
  return (a - b).lpNorm<Eigen::Infinity>();
}

double defect_bound(const BoundedFn& f, const LatticePoint& s, long n) {
  double side = 2.0 * n + 1.0;
  double inner = std::max(0.0, side - 2.0 * inf_norm(s));
  double frac = 1.0;
  for (uint32_t j = 0; j < f.domain.k; ++j) frac *= inner / side;
  return f.sup_bound * (1.0 - frac);
}

BoundedFn lift_abs(const BoundedFn& f) {
  require_rank(f, LatticeKind::Nk, "lift_abs");
  BoundedFn g = f;
  g.domain.kind = LatticeKind::Zk;
  g.evaluator = [f](const LatticePoint& t) {
    LatticePoint u(t.size());
    for (size_t j = 0; j < t.size(); ++j) u[j] = std::labs(t[j]);
    return f(u);
  };
  return g;
}

BoundedFn restrict_predicate(const BoundedFn& h, uint32_t i,
                             const std::function<bool(long)>& pred) {
  require_coord(h, i);
  BoundedFn g = h;
  g.evaluator = [h, i, pred](const LatticePoint& t) {
    if (pred(t[i - 1])) return h(t);
    return Eigen::VectorXd(Eigen::VectorXd::Zero(h.value_dim));
  };
  return g;
}

bool check_groth_decomposition(const BoundedFn& f, uint32_t i, long n, std::string* witness,
                               const RestrictOp& restrict_op) {
  require_rank(f, LatticeKind::Nk, "check_groth_decomposition");
  require_coord(f, i);
  RestrictOp R = restrict_op;
  if (!R)
    R = [](const BoundedFn& h, uint32_t ii, const std::function<bool(long)>& p) {
      return restrict_predicate(h, ii, p);
    };
  uint32_t k = f.domain.k;
  BoundedFn fp = lift_abs(f);
  BoundedFn fep = lift_abs(translate(f, unit(k, i)));
  BoundedFn p1 = R(fp, i, [](long x) { return x <= -2; });
  BoundedFn p2 = R(fp, i, [](long x) { return x == -1; });
  BoundedFn p3 = R(fp, i, [](long x) { return x == 0; });
  BoundedFn p4 = R(fp, i, [](long x) { return x >= 1; });
  BoundedFn q1 = R(fep, i, [](long x) { return x <= -1; });
  BoundedFn q2 = R(fep, i, [](long x) { return x >= 0; });
  bool ok = true;
  for_cube(n, k, [&](const LatticePoint& t) {
    if (!ok) return;
    auto fail = [&](const char* what) {
      ok = false;
      if (witness) *witness = std::string(what) + " fails at t=" + point_str(t);
    };
    Eigen::VectorXd v = fp(t);
    if (v != Eigen::VectorXd(p1(t) + p2(t) + p3(t) + p4(t))) return fail("four-term identity");
    Eigen::VectorXd w = fep(t);
    if (w != Eigen::VectorXd(q1(t) + q2(t))) return fail("two-term identity");
    long ti = t[i - 1];
    if (ti <= -2 || ti >= 1) {
      LatticePoint u = t;
      u[i - 1] += (ti <= -2) ? 1 : -1;
      if (v != fep(u)) return fail("translate matching");
    }
  });
  return ok;
}

bool disjoint_support_translates(const BoundedFn& f, uint32_t i, long m, long n) {
  require_rank(f, LatticeKind::Zk, "disjoint_support_translates");
  require_coord(f, i);
  for_cube(n, f.domain.k, [&](const LatticePoint& t) {
    if (t[i - 1] != 0 && is_nonzero(f(t)))
      throw std::invalid_argument("not supported on {t_" + std::to_string(i) +
                                  " = 0}: nonzero at " + point_str(t));
  });
  bool ok = true;
  for_cube(n, f.domain.k, [&](const LatticePoint& t) {
    if (!ok) return;
    int hits = 0;
    LatticePoint u = t;
    for (long j = 1; j <= m && hits < 2; ++j) {
      u[i - 1] = t[i - 1] + j;
      if (is_nonzero(f(u))) ++hits;
    }
    if (hits >= 2) ok = false;
  });
  return ok;
}

KernelBound kernel_mean_bound(const BoundedFn& f, uint32_t i, long c, long n) {
  require_rank(f, LatticeKind::Zk, "kernel_mean_bound");
  require_coord(f, i);
  for_cube(n, f.domain.k, [&](const LatticePoint& t) {
    if (t[i - 1] != c && is_nonzero(f(t)))
      throw std::invalid_argument("not supported on {t_" + std::to_string(i) + " = " +
                                  std::to_string(c) + "}: nonzero at " + point_str(t));
  });
  KernelBound r;
  r.measured = folner_mean(f, n).lpNorm<Eigen::Infinity>();
  r.bound = f.sup_bound / (2.0 * n + 1.0);
  if (r.measured > r.bound * (1.0 + 1e-12))
    throw std::logic_error("slab mean exceeds the counting bound");
  return r;
}

BoundedFn coset_extension(const BoundedFn& f, const std::vector<long>& moduli,
                          const std::vector<LatticePoint>& reps) {
  require_rank(f, LatticeKind::Zk, "coset_extension");
  uint32_t k = f.domain.k;
  if (moduli.size() != k) throw std::invalid_argument("moduli have wrong rank");
  unsigned long index = 1;
  for (long m : moduli) {
    if (m < 1) throw std::invalid_argument("moduli must be >= 1");
    index *= static_cast<unsigned long>(m);
  }
  auto residue = [moduli](const LatticePoint& t) {
    LatticePoint r(t.size());
    for (size_t j = 0; j < t.size(); ++j)
      r[j] = ((t[j] % moduli[j]) + moduli[j]) % moduli[j];
    return r;
  };
  BoundedFn g = f;
  if (reps.empty()) {
    // fundamental-box transversal: the representative of t is t mod m
    g.evaluator = [f, residue](const LatticePoint& t) {
      LatticePoint h = t, r = residue(t);
      for (size_t j = 0; j < h.size(); ++j) h[j] -= r[j];
      return f(h);
    };
    return g;
  }
  if (reps.size() != index) throw std::invalid_argument("reps not a transversal: wrong count");
  std::map<LatticePoint, LatticePoint> by_residue;
  for (const auto& rep : reps) {
    if (rep.size() != k) throw std::invalid_argument("rep has wrong rank");
    if (!by_residue.emplace(residue(rep), rep).second)
      throw std::invalid_argument("reps not a transversal: duplicate coset " + point_str(rep));
  }
  g.evaluator = [f, residue, by_residue](const LatticePoint& t) {
    const LatticePoint& rep = by_residue.at(residue(t));
    LatticePoint h = t;
    for (size_t j = 0; j < h.size(); ++j) h[j] -= rep[j];
    return f(h);
  };
  return g;
}

BoundedFn quotient_pullback(const BoundedFn& f, const IntMatrix& proj) {
  require_rank(f, LatticeKind::Zk, "quotient_pullback");
  size_t j = proj.size();
  if (j == 0 || j != f.domain.k) throw std::invalid_argument("projection has wrong row count");
  size_t k = proj[0].size();
  if (k < j) throw std::invalid_argument("projection maps to a larger rank");
  if (row_rank(proj, k) != j) throw std::invalid_argument("projection is not surjective");
  BoundedFn g = f;
  g.domain.k = static_cast<uint32_t>(k);
  g.evaluator = [f, proj, j](const LatticePoint& t) {
    LatticePoint u(j, 0);
    for (size_t r = 0; r < j; ++r)
      for (size_t c = 0; c < t.size(); ++c) u[r] += proj[r][c] * t[c];
    return f(u);
  };
  return g;
}

BoundedFn iso_transfer(const BoundedFn& f, const IntMatrix& u) {
  require_rank(f, LatticeKind::Zk, "iso_transfer");
  if (u.size() != f.domain.k) throw std::invalid_argument("matrix has wrong rank");
  mpz_class d = det_int(u);
  if (d != 1 && d != -1) throw std::invalid_argument("matrix is not unimodular");
  BoundedFn g = f;
  g.evaluator = [f, u](const LatticePoint& t) {
    LatticePoint v(t.size(), 0);
    for (size_t r = 0; r < t.size(); ++r)
      for (size_t c = 0; c < t.size(); ++c) v[r] += u[r][c] * t[c];
    return f(v);
  };
  return g;
}

ZeroSemigroupResult zero_semigroup_mean(const std::vector<std::vector<uint32_t>>& table,
                                        const std::vector<Eigen::VectorXd>& f) {
  size_t n = table.size();
  if (n == 0) throw std::invalid_argument("empty semigroup");
  for (const auto& row : table) {
    if (row.size() != n) throw std::invalid_argument("table is not square");
    for (uint32_t x : row)
      if (x >= n) throw std::invalid_argument("table entry out of range");
  }
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      for (size_t c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw std::invalid_argument("table is not associative at (" + std::to_string(a) +
                                      "," + std::to_string(b) + "," + std::to_string(c) + ")");
  size_t z = n;
  for (size_t cand = 0; cand < n && z == n; ++cand) {
    bool absorbing = true;
    for (size_t s = 0; s < n; ++s)
      absorbing &= table[cand][s] == cand && table[s][cand] == cand;
    if (absorbing) z = cand;
  }
  if (z == n) throw std::invalid_argument("no absorbing zero");
  if (f.size() != n) throw std::invalid_argument("value map has wrong size");
  for (const auto& v : f)
    if (v.size() != f[z].size()) throw std::invalid_argument("value dimensions disagree");
  ZeroSemigroupResult r;
  r.value = f[z];
  r.invariance_ok = true;
  for (size_t s = 0; s < n; ++s) {
    // M(f_s) = f(z * s) and M(sf) = f(s * z); both must equal f(z) exactly
    if (f[table[z][s]] != f[z] || f[table[s][z]] != f[z]) {
      r.invariance_ok = false;
      r.detail = "invariance fails at s=" + std::to_string(s);
      break;
    }
  }
  return r;
}

MeanReport mean_report(const BoundedFn& f, long n, const std::vector<LatticePoint>& shifts) {
  MeanReport rep;
  rep.n = n;
  rep.value = folner_mean(f, n);
  for (const auto& s : shifts)
    rep.defects.push_back({s, invariance_defect(f, s, n), defect_bound(f, s, n)});
  return rep;
}

BoundedFn parse_fn(const std::string& desc, LatticeGroup g) {
  auto colon = desc.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("function spec needs 'kind:args'");
  std::string kind = desc.substr(0, colon), args = desc.substr(colon + 1);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(part);
    return out;
  };
  auto kv = [&](const std::vector<std::string>& parts) {
    std::map<std::string, std::string> out;
    for (const auto& p : parts) {
      auto eq = p.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + p + "'");
      out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
  };
  auto to_long = [](const std::string& s) {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
  };
  if (kind == "const") {
    auto parts = split(args);
    if (parts.empty()) throw std::invalid_argument("const: needs at least one value");
    Eigen::VectorXd x(parts.size());
    for (size_t j = 0; j < parts.size(); ++j) x[j] = std::stod(parts[j]);
    return const_fn(g, x);
  }
  if (kind == "point") {
    auto parts = split(args);
    if (parts.size() != g.k) throw std::invalid_argument("point: needs k coordinates");
    LatticePoint t(g.k);
    for (size_t j = 0; j < parts.size(); ++j) t[j] = to_long(parts[j]);
    return point_indicator(g, t);
  }
  if (kind == "slab") {
    auto m = kv(split(args));
    if (!m.count("i") || !m.count("c")) throw std::invalid_argument("slab: needs i=<i>,c=<c>");
    return slab_indicator(g, static_cast<uint32_t>(to_long(m.at("i"))), to_long(m.at("c")));
  }
  if (kind == "random") {
    auto m = kv(split(args));
    if (!m.count("seed") || !m.count("support"))
      throw std::invalid_argument("random: needs seed=<s>,support=<r>");
    return random_fn(g, static_cast<uint64_t>(to_long(m.at("seed"))), to_long(m.at("support")));
  }
  throw std::invalid_argument("unknown function kind '" + kind + "'");
}

}  // namespace finmon
