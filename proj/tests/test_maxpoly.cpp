#include <random>

#include "doctest.h"
#include "qfc/maxpoly.hpp"

using namespace qfc;

namespace {

MpExpr ec(long num, long den = 1) {
  MpExpr e;
  e.tag = MpExpr::Tag::Const;
  e.value = Rat(num, den);
  e.value.canonicalize();
  return e;
}

MpExpr ev(int i) {
  MpExpr e;
  e.tag = MpExpr::Tag::Var;
  e.var = i;
  return e;
}

MpExpr node(MpExpr::Tag t, std::vector<MpExpr> args) {
  MpExpr e;
  e.tag = t;
  e.args = std::move(args);
  return e;
}

MpExpr eadd(MpExpr a, MpExpr b) {
  return node(MpExpr::Tag::Add, {std::move(a), std::move(b)});
}
MpExpr emul(MpExpr a, MpExpr b) {
  return node(MpExpr::Tag::Mul, {std::move(a), std::move(b)});
}
MpExpr emax(MpExpr a, MpExpr b) {
  return node(MpExpr::Tag::Max, {std::move(a), std::move(b)});
}

MpExpr random_expr(std::mt19937& rng, int depth, int arity) {
  int pick = depth == 0 ? int(rng() % 2) : int(rng() % 5);
  switch (pick) {
    case 0: return ec(long(rng() % 4), 1 + long(rng() % 2));
    case 1: return ev(int(rng() % arity));
    case 2: return eadd(random_expr(rng, depth - 1, arity),
                        random_expr(rng, depth - 1, arity));
    case 3: return emul(random_expr(rng, depth - 1, arity),
                        random_expr(rng, depth - 1, arity));
    default: return emax(random_expr(rng, depth - 1, arity),
                         random_expr(rng, depth - 1, arity));
  }
}

}  // namespace

TEST_CASE("composition substitutes arguments") {
  // f(X) = 2X composed with X+1 gives 2X+2
  MaxPoly two_x = normalize(emul(ec(2), ev(0)), 1);
  MaxPoly x_plus_1 = normalize(eadd(ev(0), ec(1)), 1);
  MaxPoly got = mp_compose(two_x, {x_plus_1});
  MaxPoly want = normalize(eadd(emul(ec(2), ev(0)), ec(2)), 1);
  CHECK(maxpoly_equal(got, want));
}

TEST_CASE("addition distributes over max branches") {
  MaxPoly m = normalize(emax(ev(0), ev(1)), 2);
  MaxPoly got = mp_add(m, MaxPoly::constant(Rat(1)));
  CHECK(got.branches.size() == 2);
  CHECK(maxpoly_equal(got, normalize(emax(eadd(ev(0), ec(1)),
                                          eadd(ev(1), ec(1))), 2)));
}

TEST_CASE("multiplication distributes over max branches") {
  MaxPoly got = mp_mul(normalize(ev(0), 2),
                       normalize(emax(ev(1), ec(2)), 2));
  CHECK(maxpoly_equal(got, normalize(emax(emul(ev(0), ev(1)),
                                          emul(ec(2), ev(0))), 2)));
}

TEST_CASE("normalization prunes dominated branches") {
  // max(X, X + 1) = X + 1 on nonnegative reals
  MaxPoly m = normalize(emax(ev(0), eadd(ev(0), ec(1))), 1);
  CHECK(m.is_single_branch());
  CHECK(maxpoly_equal(m, normalize(eadd(ev(0), ec(1)), 1)));
}

TEST_CASE("dominance certifies valid inequalities") {
  // U + Z + 2 >= Z + U + 1
  MaxPoly lhs = normalize(eadd(eadd(ev(0), ev(1)), ec(2)), 2);
  MaxPoly rhs = normalize(eadd(eadd(ev(1), ev(0)), ec(1)), 2);
  CHECK(compare_geq(lhs, rhs, false).valid());
  CHECK(compare_geq(lhs, rhs, true).valid());
  CHECK(compare_geq(lhs, lhs, false).valid());
  CHECK_FALSE(compare_geq(lhs, lhs, true).valid());
}

TEST_CASE("sampling refutes false inequalities with a witness") {
  MaxPoly x = normalize(ev(0), 1);
  MaxPoly two_x = normalize(emul(ec(2), ev(0)), 1);
  Verdict v = compare_geq(x, two_x, false);
  REQUIRE(v.refuted());
  REQUIRE(v.witness.size() == 1);
  CHECK(x.eval_at(v.witness) < two_x.eval_at(v.witness));
}

TEST_CASE("strict dominance across a max") {
  // X1 + X2 + X3 + X4 + 2 > max(X1 + X2, X3 + X4)
  MaxPoly lhs = normalize(
      eadd(eadd(eadd(ev(0), ev(1)), eadd(ev(2), ev(3))), ec(2)), 4);
  MaxPoly rhs = normalize(emax(eadd(ev(0), ev(1)), eadd(ev(2), ev(3))), 4);
  CHECK(compare_geq(lhs, rhs, true).valid());
}

TEST_CASE("dominance-only mode never refutes") {
  MaxPoly x = normalize(ev(0), 1);
  MaxPoly two_x = normalize(emul(ec(2), ev(0)), 1);
  Verdict v = compare_geq(x, two_x, false, true);
  CHECK(v.kind == VerdictKind::Unknown);
}

TEST_CASE("subterm and monotonicity predicates") {
  MaxPoly half_x = normalize(emul(ec(1, 2), ev(0)), 1);
  CHECK(has_subterm_property(half_x).refuted());
  CHECK(has_subterm_property(normalize(emax(ev(0), ev(1)), 2)).valid());
  CHECK(is_monotone(half_x));
}

TEST_CASE("additive constructor shapes") {
  MaxPoly add2 = normalize(eadd(eadd(ev(0), ev(1)), ec(1)), 2);
  CHECK(is_additive_constructor(add2));
  CHECK(additive_constant(add2) == Rat(1));
  CHECK(is_additive_constructor(MaxPoly::constant(Rat(0))));
  CHECK_FALSE(is_additive_constructor(normalize(eadd(ev(0), ev(1)), 2)));
  CHECK_FALSE(is_additive_constructor(normalize(emul(ec(2), ev(0)), 1)));
  CHECK_FALSE(is_additive_constructor(normalize(emax(ev(0), ev(1)), 2)));
}

TEST_CASE("degree computation") {
  CHECK(normalize(emul(ev(0), emul(ev(0), ev(1))), 2).degree() == 3);
  CHECK(MaxPoly::constant(Rat(5)).degree() == 0);
  CHECK(normalize(emax(ev(0), emul(ev(0), ev(0))), 1).degree() == 2);
}

TEST_CASE("normalization preserves pointwise values") {
  std::mt19937 rng(23);
  std::vector<Rat> pool = {Rat(0), Rat(1, 2), Rat(1), Rat(2), Rat(7, 3),
                           Rat(10)};
  for (int i = 0; i < 500; ++i) {
    int arity = 1 + int(rng() % 3);
    MpExpr e = random_expr(rng, 3, arity);
    MaxPoly m = normalize(e, arity);
    for (int s = 0; s < 20; ++s) {
      std::vector<Rat> x(arity);
      for (auto& xi : x) xi = pool[rng() % pool.size()];
      CHECK(m.eval_at(x) == mpexpr_eval(e, x));
    }
  }
}

TEST_CASE("comparison verdicts are sound on random instances") {
  std::mt19937 rng(29);
  std::vector<Rat> pool = {Rat(0), Rat(1, 2), Rat(1), Rat(3), Rat(25)};
  for (int i = 0; i < 2000; ++i) {
    int arity = 1 + int(rng() % 2);
    MaxPoly a = normalize(random_expr(rng, 2, arity), arity);
    MaxPoly b = normalize(random_expr(rng, 2, arity), arity);
    bool strict = rng() % 2;
    Verdict v = compare_geq(a, b, strict, false, rng());
    if (v.valid()) {
      for (int s = 0; s < 50; ++s) {
        std::vector<Rat> x(arity);
        for (auto& xi : x) xi = pool[rng() % pool.size()];
        Rat l = a.eval_at(x), r = b.eval_at(x);
        CHECK_MESSAGE(strict ? l > r : l >= r,
                      a.to_string() << " vs " << b.to_string());
      }
    } else if (v.refuted()) {
      REQUIRE(int(v.witness.size()) == arity);
      Rat l = a.eval_at(v.witness), r = b.eval_at(v.witness);
      CHECK((strict ? l <= r : l < r));
    }
  }
}
