#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finmon/construction.hpp"
#include "finmon/groth.hpp"
#include "finmon/means.hpp"
#include "finmon/trace.hpp"
#include "finmon/verify.hpp"

using namespace finmon;
using nlohmann::json;

namespace {

std::string cache_dir_from_env() {
  const char* dir = std::getenv("FINMON_CACHE_DIR");
  return dir ? dir : "";
}

ConstructionState make_state(uint32_t p, uint64_t log_limit = 20000) {
  return ConstructionState(FieldPrime(p), log_limit, cache_dir_from_env());
}

// "e0;e1" -> "<e0,e1>"
std::string angle_form(const Subspace& u) {
  std::string rows = u.format();
  for (char& c : rows)
    if (c == ';') c = ',';
  return "<" + rows + ">";
}

LatticeGroup parse_group(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'Z' && s[0] != 'N'))
    throw std::invalid_argument("group must be Z<k> or N<k>");
  size_t pos = 0;
  unsigned long k = std::stoul(s.substr(1), &pos);
  if (pos != s.size() - 1 || k < 1) throw std::invalid_argument("bad group rank in '" + s + "'");
  return {s[0] == 'Z' ? LatticeKind::Zk : LatticeKind::Nk, static_cast<uint32_t>(k)};
}

LatticePoint parse_shift(const std::string& tok, uint32_t k) {
  bool neg = !tok.empty() && tok[0] == '-';
  const std::string body = neg ? tok.substr(1) : tok;
  if (body.size() < 2 || body[0] != 'e')
    throw std::invalid_argument("shift must be e<i> or -e<i>, got '" + tok + "'");
  size_t pos = 0;
  unsigned long i = std::stoul(body.substr(1), &pos);
  if (pos != body.size() - 1 || i < 1 || i > k)
    throw std::invalid_argument("shift coordinate out of range in '" + tok + "'");
  LatticePoint s(k, 0);
  s[i - 1] = neg ? -1 : 1;
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

std::map<std::string, std::string> parse_params(const std::string& s) {
  std::map<std::string, std::string> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value in --params, got '" + part + "'");
    out[part.substr(0, eq)] = part.substr(eq + 1);
  }
  return out;
}

long param_long(const std::map<std::string, std::string>& m, const std::string& key, long dflt) {
  auto it = m.find(key);
  if (it == m.end()) return dflt;
  size_t pos = 0;
  long v = std::stol(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument("bad integer for " + key);
  return v;
}

uint32_t parse_checks(const std::string& s) {
  uint32_t checks = 0;
  for (const auto& name : split(s, ',')) {
    if (name == "comm") checks |= kCheckComm;
    else if (name == "assoc") checks |= kCheckAssoc;
    else if (name == "cancel") checks |= kCheckCancel;
    else if (name == "contain") checks |= kCheckContain;
    else if (name == "factor") checks |= kCheckFactor;
    else if (name == "groth") checks |= kCheckGroth;
    else if (name == "identity") checks |= kCheckIdentity;
    else if (name == "all") checks |= kCheckAll;
    else throw std::invalid_argument("unknown check '" + name + "'");
  }
  return checks;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json point_json(const LatticePoint& t) {
  json a = json::array();
  for (long x : t) a.push_back(x);
  return a;
}

// Families of associative tables with absorbing zero, mirrored by the test
// suite; used by the zero-semigroup lemma driver.
std::vector<std::vector<std::vector<uint32_t>>> zero_tables(uint32_t max_n) {
  std::vector<std::vector<std::vector<uint32_t>>> out;
  for (uint32_t n = 1; n <= max_n; ++n) {
    std::vector<std::vector<uint32_t>> t(n, std::vector<uint32_t>(n, 0));
    out.push_back(t);
    for (uint32_t s = 0; s < n; ++s) t[s][s] = s;
    out.push_back(t);
    for (uint32_t a = 0; a < n; ++a)
      for (uint32_t b = 0; b < n; ++b) t[a][b] = std::min(a, b);
    out.push_back(t);
  }
  return out;
}

int run_lemma(const std::string& name, const std::map<std::string, std::string>& params,
              bool machine) {
  uint32_t k = static_cast<uint32_t>(param_long(params, "k", 2));
  uint32_t i = static_cast<uint32_t>(param_long(params, "i", 1));
  long n = param_long(params, "n", 6);
  uint64_t seed = static_cast<uint64_t>(param_long(params, "seed", 1));
  json doc{{"name", name}};
  bool pass = true;
  std::string witness;
  if (name == "groth-decomposition") {
    BoundedFn f = random_fn({LatticeKind::Nk, k}, seed, n);
    pass = check_groth_decomposition(f, i, n, &witness);
  } else if (name == "kernel-bound") {
    long c = param_long(params, "c", 0);
    BoundedFn f = restrict_predicate(random_fn({LatticeKind::Zk, k}, seed, n), i,
                                     [c](long x) { return x == c; });
    KernelBound kb = kernel_mean_bound(f, i, c, n);
    doc["measured"] = kb.measured;
    doc["bound"] = kb.bound;
    if (!machine)
      std::cout << "measured=" << fmt_double(kb.measured) << " bound=" << fmt_double(kb.bound)
                << "\n";
  } else if (name == "disjoint-support") {
    long m = param_long(params, "m", 5);
    pass = disjoint_support_translates(slab_indicator({LatticeKind::Zk, k}, i, 0), i, m, n);
    if (!pass) witness = "translates overlap";
  } else if (name == "zero-semigroup") {
    uint32_t max_n = static_cast<uint32_t>(param_long(params, "max", 5));
    uint32_t tables = 0;
    for (const auto& table : zero_tables(max_n)) {
      std::vector<Eigen::VectorXd> vals;
      for (size_t s = 0; s < table.size(); ++s) {
        Eigen::VectorXd v(1);
        v[0] = static_cast<double>((seed + 3 * s) % 7) - 3.0;
        vals.push_back(v);
      }
      ZeroSemigroupResult r = zero_semigroup_mean(table, vals);
      ++tables;
      if (!r.invariance_ok) {
        pass = false;
        witness = "table of size " + std::to_string(table.size()) + ": " + r.detail;
        break;
      }
    }
    doc["tables"] = tables;
    if (!machine) std::cout << "tables=" << tables << "\n";
  } else if (name == "coset") {
    long mod = param_long(params, "mod", 2);
    std::vector<long> moduli(k, mod);
    Eigen::VectorXd x(1);
    x[0] = 1.5;
    BoundedFn ext = coset_extension(const_fn({LatticeKind::Zk, k}, x), moduli);
    for (long t = -n; t <= n && pass; ++t) {
      LatticePoint pt(k, t);
      if (ext(pt) != x) {
        pass = false;
        witness = "constant not preserved at coordinate value " + std::to_string(t);
      }
    }
  } else if (name == "quotient") {
    IntMatrix proj(1, std::vector<long>(k, 0));
    proj[0][0] = 1;
    BoundedFn pulled = quotient_pullback(point_indicator({LatticeKind::Zk, 1}, {0}), proj);
    BoundedFn slab = slab_indicator({LatticeKind::Zk, k}, 1, 0);
    for (long a = -n; a <= n && pass; ++a) {
      LatticePoint pt(k, 0);
      pt[0] = a;
      if (pulled(pt) != slab(pt)) {
        pass = false;
        witness = "pullback disagrees with the slab at t_1=" + std::to_string(a);
      }
    }
  } else if (name == "iso") {
    IntMatrix u(k, std::vector<long>(k, 0));
    for (uint32_t r = 0; r < k; ++r) u[r][r] = 1;
    if (k >= 2) u[0][1] = 1;  // shear
    BoundedFn g = iso_transfer(random_fn({LatticeKind::Zk, k}, seed, 3), u);
    LatticePoint e1(k, 0);
    e1[0] = 1;
    double d = invariance_defect(g, e1, n);
    double b = defect_bound(g, e1, n);
    doc["defect"] = d;
    doc["bound"] = b;
    if (!machine) std::cout << "defect=" << fmt_double(d) << " bound=" << fmt_double(b) << "\n";
    if (d > b + 1e-12) {
      pass = false;
      witness = "defect exceeds the boundary bound";
    }
  } else {
    throw std::invalid_argument("unknown lemma '" + name + "'");
  }
  doc["pass"] = pass;
  if (!witness.empty()) doc["witness"] = witness;
  if (machine)
    std::cout << doc.dump() << "\n";
  else if (pass)
    std::cout << "pass\n";
  else
    std::cout << "fail: " << witness << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for the subspace star monoid and its box means"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "machine"}));

  uint32_t p = 2;
  std::string subspace_text, lhs_text, rhs_text, id_text;
  std::string out_file, checks_text = "all", group_text = "Z1", fn_text, shifts_text;
  std::string lemma_name, params_text;
  uint64_t steps = 0;
  long max_id = 10, assoc_max_id = -1, box_n = 10;

  CLI::App* c_rank = app.add_subcommand("rank", "id of a subspace in the well-ordering");
  c_rank->add_option("--p", p)->required(false);
  c_rank->add_option("--subspace", subspace_text)->required();

  CLI::App* c_unrank = app.add_subcommand("unrank", "subspace with the given id");
  c_unrank->add_option("--p", p);
  c_unrank->add_option("--id", id_text)->required();

  CLI::App* c_star = app.add_subcommand("star", "product of two subspaces");
  c_star->add_option("--p", p);
  c_star->add_option("--lhs", lhs_text)->required();
  c_star->add_option("--rhs", rhs_text)->required();

  CLI::App* c_factor = app.add_subcommand("factor", "factorization into prime ids");
  c_factor->add_option("--p", p);
  c_factor->add_option("--subspace", subspace_text)->required();

  CLI::App* c_classify = app.add_subcommand("classify", "P or Q for the given id");
  c_classify->add_option("--p", p);
  c_classify->add_option("--id", id_text)->required();

  CLI::App* c_trace = app.add_subcommand("trace", "construction trace document");
  c_trace->add_option("--p", p);
  c_trace->add_option("--steps", steps)->required();
  c_trace->add_option("--out", out_file)->required();

  CLI::App* c_verify = app.add_subcommand("verify", "check the monoid laws on a prefix");
  c_verify->add_option("--p", p);
  c_verify->add_option("--max-id", max_id);
  c_verify->add_option("--assoc-max-id", assoc_max_id);
  c_verify->add_option("--checks", checks_text);

  CLI::App* c_mean = app.add_subcommand("mean", "box average with shift defects");
  c_mean->add_option("--group", group_text);
  c_mean->add_option("--fn", fn_text)->required();
  c_mean->add_option("--n", box_n)->required();
  c_mean->add_option("--shifts", shifts_text);

  CLI::App* c_lemma = app.add_subcommand("lemma", "finite checks of the mean lemmas");
  c_lemma->add_option("--name", lemma_name)->required();
  c_lemma->add_option("--params", params_text);

  try {
    app.parse(argc, argv);
    bool machine = format == "machine";

    if (c_rank->parsed()) {
      FieldPrime f(p);
      Enumeration en(f, 1u << 12, cache_dir_from_env());
      mpz_class id = en.rank(Subspace::parse(subspace_text, f));
      if (machine)
        std::cout << json{{"id", id.get_str()}}.dump() << "\n";
      else
        std::cout << id.get_str() << "\n";
      return 0;
    }
    if (c_unrank->parsed()) {
      FieldPrime f(p);
      Enumeration en(f, 1u << 12, cache_dir_from_env());
      Subspace u = en.unrank(mpz_class(id_text));
      if (machine)
        std::cout << json{{"subspace", u.format()}}.dump() << "\n";
      else
        std::cout << u.format() << "\n";
      return 0;
    }
    if (c_star->parsed()) {
      ConstructionState st = make_state(p);
      const FieldPrime& f = st.enumeration().field();
      Subspace prod = st.star(Subspace::parse(lhs_text, f), Subspace::parse(rhs_text, f));
      mpz_class id = st.enumeration().rank(prod);
      Multiset fact = st.factor(prod);
      if (machine) {
        std::cout << json{{"subspace", prod.format()},
                          {"id", id.get_str()},
                          {"factorization", format_multiset(fact)}}
                         .dump()
                  << "\n";
      } else {
        std::cout << angle_form(prod) << " (id " << id.get_str() << ")\n";
        std::cout << "factorization: " << format_multiset(fact) << "\n";
      }
      return 0;
    }
    if (c_factor->parsed()) {
      ConstructionState st = make_state(p);
      const FieldPrime& f = st.enumeration().field();
      Multiset fact = st.factor(Subspace::parse(subspace_text, f));
      if (machine)
        std::cout << json{{"factorization", format_multiset(fact)}}.dump() << "\n";
      else
        std::cout << format_multiset(fact) << "\n";
      return 0;
    }
    if (c_classify->parsed()) {
      ConstructionState st = make_state(p);
      Classify c = st.classify(st.enumeration().unrank(mpz_class(id_text)));
      std::string text = c == Classify::P ? "P" : (c == Classify::Q ? "Q" : "zero");
      if (machine)
        std::cout << json{{"class", text}}.dump() << "\n";
      else
        std::cout << text << "\n";
      return 0;
    }
    if (c_trace->parsed()) {
      ConstructionState st = make_state(p, std::max<uint64_t>(steps, 20000));
      std::string doc = build_trace(st, steps);
      std::ofstream out(out_file, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot open output file '" + out_file + "'");
      out << doc;
      out.close();
      std::string hash = sha256_hex(doc);
      if (machine)
        std::cout << json{{"steps", steps}, {"sha256", hash}, {"out", out_file}}.dump() << "\n";
      else
        std::cout << "sha256 " << hash << "\n";
      return 0;
    }
    if (c_verify->parsed()) {
      if (max_id < 0) throw std::invalid_argument("--max-id must be >= 0");
      if (assoc_max_id < 0) assoc_max_id = max_id;
      ConstructionState st = make_state(p);
      VerifyReport rep = verify_axioms(st, static_cast<uint64_t>(max_id),
                                       static_cast<uint64_t>(assoc_max_id),
                                       parse_checks(checks_text));
      if (machine) {
        json fails = json::array();
        for (const auto& fl : rep.failures)
          fails.push_back({{"law", fl.law}, {"detail", fl.detail}});
        std::cout << json{{"pairs", rep.pairs},
                          {"triples", rep.triples},
                          {"cancel_pairs", rep.cancel_pairs},
                          {"factor_cases", rep.factor_cases},
                          {"groth_cases", rep.groth_cases},
                          {"failures", fails}}
                         .dump()
                  << "\n";
      } else {
        std::string text = format_report(rep);
        if (text.empty() || text.back() != '\n') text += '\n';
        std::cout << text;
      }
      return rep.ok() ? 0 : 1;
    }
    if (c_mean->parsed()) {
      LatticeGroup g = parse_group(group_text);
      BoundedFn f = parse_fn(fn_text, g);
      std::vector<LatticePoint> shifts;
      if (!shifts_text.empty())
        for (const auto& tok : split(shifts_text, ','))
          shifts.push_back(parse_shift(tok, g.k));
      MeanReport rep = mean_report(f, box_n, shifts);
      if (machine) {
        json defects = json::array();
        for (const auto& d : rep.defects)
          defects.push_back(
              {{"shift", point_json(d.shift)}, {"defect", d.defect}, {"bound", d.bound}});
        json value = json::array();
        for (long j = 0; j < rep.value.size(); ++j) value.push_back(rep.value[j]);
        std::cout << json{{"n", rep.n}, {"value", value}, {"defects", defects}}.dump() << "\n";
      } else {
        std::cout << "n=" << rep.n << " value=";
        for (long j = 0; j < rep.value.size(); ++j)
          std::cout << (j ? "," : "") << fmt_double(rep.value[j]);
        std::cout << "\n";
        for (const auto& d : rep.defects) {
          std::cout << "shift " << point_json(d.shift).dump() << ": defect="
                    << fmt_double(d.defect) << " bound=" << fmt_double(d.bound) << "\n";
        }
      }
      return 0;
    }
    if (c_lemma->parsed()) return run_lemma(lemma_name, parse_params(params_text), machine);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
