#include <chrono>

#include "doctest.h"
#include "helpers.hpp"
#include "qfc/eval.hpp"
#include "qfc/syntax.hpp"

using namespace qfc;

namespace {

Expr var(const std::string& n) {
  Expr e;
  e.tag = Expr::Tag::Var;
  e.sym = n;
  return e;
}

Expr cns(const std::string& n, std::vector<Expr> args = {}) {
  Expr e;
  e.tag = Expr::Tag::Cns;
  e.sym = n;
  e.args = std::move(args);
  return e;
}

Value val(const std::string& n, std::vector<Value> args = {}) {
  Value v;
  v.cons = n;
  v.args = std::move(args);
  return v;
}

}  // namespace

TEST_CASE("pattern match binds sub-values") {
  // S(u), S(v) against S(S(0)), S(0)
  std::vector<Expr> pats = {cns("S", {var("u")}), cns("S", {var("v")})};
  std::vector<Value> vals = {val("S", {val("S", {val("0")})}),
                             val("S", {val("0")})};
  auto sub = match(pats, vals);
  REQUIRE(sub.has_value());
  CHECK(sub->at("u") == val("S", {val("0")}));
  CHECK(sub->at("v") == val("0"));
}

TEST_CASE("pattern match fails on constructor clash") {
  std::vector<Expr> pats = {cns("0"), var("z")};
  std::vector<Value> vals = {val("S", {val("0")}), val("0")};
  CHECK_FALSE(match(pats, vals).has_value());
}

TEST_CASE("size counts non-nullary symbols") {
  CHECK(size_of(val("0")) == 0);
  CHECK(size_of(val("S", {val("S", {val("0")})})) == 2);
  Value t = val("c", {val("tip", {val("0")}), val("tip", {val("0")})});
  CHECK(size_of(t) == 3 + size_of(val("0")) * 2 + 0);
  CHECK(size_of(Value::make_err()) == 0);
}

TEST_CASE("numerals have size n") {
  for (long n = 0; n <= 100; ++n) {
    Value v = numeral(n);
    CHECK(size_of(v) == n);
    CHECK(numeral_value(v) == n);
  }
}

TEST_CASE("validation flags overlapping branches") {
  const char* text =
      "cons 0/0\ncons S/1\n"
      "f(x, y) = case x, y of 0, z -> 0 | u, v -> u\n";
  Program p = parse_program(text);
  auto diags = validate_program(p);
  REQUIRE_FALSE(diags.empty());
  bool found = false;
  for (const auto& d : diags)
    if (d.rule.find("overlap") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validation flags nested case") {
  // The grammar cannot even express a nested case, so build the tree by
  // hand: f(x) = case x of 0 -> (case x of 0 -> 0).
  Program p = parse_program("cons 0/0\ncons S/1\nf(x) = x\n");
  Expr zero = cns("0");
  Expr inner;
  inner.tag = Expr::Tag::Case;
  inner.args = {var("x")};
  inner.branches = {Branch{{zero}, zero}};
  Expr outer;
  outer.tag = Expr::Tag::Case;
  outer.args = {var("x")};
  outer.branches = {Branch{{zero}, inner}};
  p.defs[0].body = outer;
  CHECK(contains_case(inner));
  CHECK_FALSE(validate_program(p).empty());
}

TEST_CASE("corpus programs validate cleanly") {
  for (const char* name : {"div.fp", "minus.fp", "double.fp", "expdouble.fp",
                           "treediv.fp", "growing.fp", "const.fp",
                           "loop.fp"}) {
    Program p = load_corpus(name);
    CHECK_MESSAGE(validate_program(p).empty(), name);
  }
}

TEST_CASE("value order is strict and total") {
  std::vector<Value> vs = {val("0"), val("S", {val("0")}), numeral(3),
                           Value::make_err(), val("tip", {val("0")})};
  for (const Value& a : vs) {
    CHECK_FALSE(a < a);
    for (const Value& b : vs) {
      if (a == b) continue;
      CHECK((a < b) != (b < a));
    }
  }
}

TEST_CASE("value comparison is linear in term size") {
  Value a = numeral(4000), b = numeral(4001);
  auto t0 = std::chrono::steady_clock::now();
  CHECK(a < b);
  CHECK_FALSE(b < a);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  CHECK(ms < 1000);
}

TEST_CASE("patterns_overlap on unifiable pairs") {
  std::vector<Expr> a = {cns("0"), var("z")};
  std::vector<Expr> b = {var("x"), var("y")};
  std::vector<Expr> c = {cns("S", {var("w")}), var("y")};
  CHECK(patterns_overlap(a, b));
  CHECK_FALSE(patterns_overlap(a, c));
}
