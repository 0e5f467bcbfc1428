#include <chrono>

#include "doctest.h"
#include "helpers.hpp"
#include "qfc/criterion.hpp"
#include "qfc/synth.hpp"

using namespace qfc;

TEST_CASE("subtraction admits a synthesized quasi-interpretation") {
  Program p = load_corpus("minus.fp");
  SynthResult res = synthesize_qi(p);
  REQUIRE(res.found.has_value());
  const AssignmentSet& a = *res.found;
  CHECK(a.synthesized);
  REQUIRE(a.sup.count("S"));
  CHECK(is_additive_constructor(a.sup.at("S")));
  CHECK(additive_constant(a.sup.at("S")) == Rat(1));
  // the minus interpretation dominates both projections
  const MaxPoly& m = a.sup.at("minus");
  CHECK(m.eval_at({Rat(5), Rat(3)}) >= Rat(5));
  CHECK(m.eval_at({Rat(3), Rat(5)}) >= Rat(5));
  QiReport cert = check_quasi_interpretation(p, a.sup);
  CHECK(cert.ok);
}

TEST_CASE("doubling synthesizes an affine interpretation") {
  Program p = load_corpus("double.fp");
  SynthResult res = synthesize_qi(p);
  REQUIRE(res.found.has_value());
  const MaxPoly& d = res.found->sup.at("double");
  // must absorb S(S(double(y))) <= double(S(y)): d(x+1) >= d(x) + 2
  CHECK(d.eval_at({Rat(4)}) >= Rat(8));
  CHECK(check_quasi_interpretation(p, res.found->sup).ok);
}

TEST_CASE("division admits no quasi-interpretation in the family") {
  Program p = load_corpus("div.fp");
  auto t0 = std::chrono::steady_clock::now();
  SynthResult res = synthesize_qi(p);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  CHECK_FALSE(res.found.has_value());
  CHECK_FALSE(res.timed_out);
  CHECK(res.candidates_screened > 0);
  CHECK(secs < 60);
  // the failure report names at least one non-valid rule
  bool failed_rule = false;
  for (const auto& r : res.failure.rules)
    if (!r.verdict.valid()) failed_rule = true;
  CHECK((failed_rule || !res.failure.property_failures.empty()));
}

TEST_CASE("non-recursive programs synthesize quickly") {
  Program p = load_corpus("const.fp");
  SynthResult res = synthesize_qi(p);
  REQUIRE(res.found.has_value());
  CHECK(check_quasi_interpretation(p, res.found->sup).ok);
}

TEST_CASE("a synthesized QI is a sup-interpretation and a weight") {
  Program p = load_corpus("minus.fp");
  SynthResult res = synthesize_qi(p);
  REQUIRE(res.found.has_value());
  AssignmentSet a = qi_to_supinterpretation(res.found->sup);
  SupReport sup = check_sup_conditions(p, a, 14);
  CHECK(sup.ok);
  CriterionReport crit = check_quasi_friendly(p, a);
  CHECK(crit.status == CriterionStatus::QuasiFriendly);
}

TEST_CASE("tight timeouts surrender without a certificate") {
  Program p = load_corpus("div.fp");
  SynthResult res = synthesize_qi(p, {}, std::chrono::milliseconds(1));
  CHECK_FALSE(res.found.has_value());
}

TEST_CASE("exponential growth defeats the family") {
  Program p = load_corpus("expdouble.fp");
  SynthResult res = synthesize_qi(p);
  CHECK_FALSE(res.found.has_value());
}
