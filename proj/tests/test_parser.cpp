#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qfc/parser.hpp"

using namespace qfc;

TEST_CASE("pretty_print round-trips the corpus") {
  for (const char* name : {"div.fp", "minus.fp", "double.fp", "expdouble.fp",
                           "treediv.fp", "growing.fp", "const.fp"}) {
    Program p = load_corpus(name);
    Program q = parse_program(pretty_print(p));
    REQUIRE_MESSAGE(q.defs.size() == p.defs.size(), name);
    for (size_t i = 0; i < p.defs.size(); ++i) {
      CHECK(q.defs[i].fsym == p.defs[i].fsym);
      CHECK(q.defs[i].params == p.defs[i].params);
      CHECK(expr_equal(q.defs[i].body, p.defs[i].body));
    }
    REQUIRE(q.symbols.entries.size() == p.symbols.entries.size());
    for (const auto& [sym, info] : p.symbols.entries) {
      const SymbolInfo* other = q.symbols.find(sym);
      REQUIRE(other);
      CHECK(other->kind == info.kind);
      CHECK(other->arity == info.arity);
    }
  }
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_program("cons S/1\nf(x) = case of\n"), ParseError);
  CHECK_THROWS_AS(parse_program("cons S/\n"), ParseError);
  CHECK_THROWS_AS(parse_program("f(x) = g(x\n"), ParseError);
  try {
    parse_program("cons 0/0\nf(x) = @\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("expression parsing uses the program vocabulary") {
  Program p = load_corpus("div.fp");
  Expr e = parse_expression("q(S(0), S(S(0)))", p);
  CHECK(e.tag == Expr::Tag::Fct);
  CHECK(e.sym == "q");
  REQUIRE(e.args.size() == 2);
  CHECK_THROWS_AS(parse_expression("q(S(0))", p), ParseError);
  CHECK_THROWS_AS(parse_expression("unknown(0)", p), ParseError);
}

TEST_CASE("annotation parsing accepts rational coefficients") {
  Program p = load_corpus("growing.fp");
  AnnotationFile ann = load_ann("growing.ann", p);
  REQUIRE(ann.sup.count("half"));
  const MaxPoly& h = ann.sup.at("half");
  CHECK(h.eval_at({Rat(4)}) == Rat(2));
  CHECK(h.eval_at({Rat(1)}) == Rat(1, 2));
  CHECK(maxpoly_equal(ann.weight.at("double"),
                      parse_annotations("weight f2(X1) = 2 * X1 + 0\n",
                                        [] {
                                          Program q;
                                          q.symbols.declare("f2", Kind::Fct, 1);
                                          return q;
                                        }())
                          .weight.at("f2")));
}

TEST_CASE("annotation parsing reads precedence and status lines") {
  Program p = load_corpus("div.fp");
  AnnotationFile ann = load_ann("div.ann", p);
  REQUIRE(ann.prec.size() == 2);
  CHECK(ann.prec[0] == std::vector<std::string>{"q"});
  CHECK(ann.prec[1] == std::vector<std::string>{"minus"});
  CHECK(ann.status.at("q") == "product");
}

TEST_CASE("annotation rejects weight entries on constructors") {
  Program p = load_corpus("div.fp");
  CHECK_THROWS_AS(parse_annotations("weight S(X1) = X1\n", p), ParseError);
}

TEST_CASE("annotations round-trip through printing") {
  Program p = load_corpus("div.fp");
  AnnotationFile ann = load_ann("div.ann", p);
  AnnotationFile back = parse_annotations(annotations_to_string(ann, p), p);
  for (const auto& [sym, mp] : ann.sup)
    CHECK_MESSAGE(maxpoly_equal(back.sup.at(sym), mp), sym);
  for (const auto& [sym, mp] : ann.weight)
    CHECK_MESSAGE(maxpoly_equal(back.weight.at(sym), mp), sym);
  CHECK(back.prec == ann.prec);
  CHECK(back.status == ann.status);
}

TEST_CASE("mutated sources never crash the parser") {
  std::string base = read_file(corpus_path("div.fp"));
  std::mt19937 rng(11);
  const std::string chars = "()|,=->caseofS0#\n ";
  for (int i = 0; i < 300; ++i) {
    std::string s = base;
    int edits = 1 + int(rng() % 4);
    for (int k = 0; k < edits; ++k) {
      size_t pos = rng() % s.size();
      switch (rng() % 3) {
        case 0: s[pos] = chars[rng() % chars.size()]; break;
        case 1: s.erase(pos, 1); break;
        default: s.insert(pos, 1, chars[rng() % chars.size()]); break;
      }
    }
    try {
      Program p = parse_program(s);
      validate_program(p);
    } catch (const ParseError&) {
      // rejection is fine; crashing is not
    }
  }
  CHECK(true);
}
