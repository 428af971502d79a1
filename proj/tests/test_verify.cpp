#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "finmon/verify.hpp"

using namespace finmon;

TEST_CASE("all axioms hold on ids < 10") {
  ConstructionState st(FieldPrime(2));
  VerifyReport rep = verify_axioms(st, 10);
  CHECK(rep.ok());
  CHECK(rep.pairs == 11 * 11);
  CHECK(rep.triples == 11 * 11 * 11);
  CHECK(rep.cancel_pairs == 11 * 11);
  CHECK(rep.factor_cases == 11);
  CHECK(rep.groth_cases == 11 * 11);
  std::string text = format_report(rep);
  CHECK(text.find("failures=0") != std::string::npos);
}

TEST_CASE("trivial scope: just the identity and the first prime") {
  ConstructionState st(FieldPrime(2));
  CHECK(verify_axioms(st, 1).ok());
}

TEST_CASE("check selection limits the work") {
  ConstructionState st(FieldPrime(2));
  VerifyReport rep = verify_axioms(st, 6, 6, kCheckComm | kCheckContain);
  CHECK(rep.ok());
  CHECK(rep.pairs == 7 * 7);
  CHECK(rep.triples == 0);
  CHECK(rep.cancel_pairs == 0);
  CHECK(rep.factor_cases == 0);
  CHECK(rep.groth_cases == 0);
}

TEST_CASE("a corrupted dom entry is caught as a cancellativity failure") {
  FieldPrime f(2);
  ConstructionState st(f);
  // run far enough that {0^2} and {1, 0} are both in dom, then make the
  // value of {0^2} collide with the value of {1, 0}
  for (int i = 0; i < 5; ++i) st.step();
  Multiset a = parse_multiset("{0^2}");
  auto collide = st.dom_lookup(parse_multiset("{1, 0}"));
  REQUIRE(collide);
  st.overwrite_dom_value(a, *collide);
  CHECK(st.f_apply(a) == *collide);  // e0 * e0 and e0 * e1 now coincide
  VerifyReport rep = verify_axioms(st, 4, 0, kCheckCancel);
  CHECK(!rep.ok());
  bool cancel_reported = false;
  for (const auto& fl : rep.failures) cancel_reported |= fl.law == "cancellativity";
  CHECK(cancel_reported);
}
