#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfc/maxpoly.hpp"
#include "qfc/syntax.hpp"

namespace qfc {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                           std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// Surface form:
//   cons S/1            constructor declaration
//   op   hd/1           operator declaration
//   f(x,y) = case x,y of 0,z -> 0 | S(u),S(v) -> f(u,v)
//   # comment to end of line
Program parse_program(const std::string& text);

// Expression in the context of an already-parsed program (CLI input).
Expr parse_expression(const std::string& text, const Program& p);

std::string pretty_print(const Program& p);

struct AnnotationFile {
  std::map<std::string, MaxPoly> sup;       // theta entries
  std::map<std::string, MaxPoly> weight;    // omega entries (Fct only)
  // prec groups, outermost first: each group is an equivalence class,
  // earlier groups are strictly above later ones.
  std::vector<std::vector<std::string>> prec;
  std::map<std::string, std::string> status;  // "product" | "lex"
};

// Line-oriented:
//   sup S(X1) = X1 + 1
//   sup 0 = 0
//   weight q(X1,X2) = X1 + X2
//   status q = product
//   prec q > minus = minus2
AnnotationFile parse_annotations(const std::string& text, const Program& p);

std::string annotations_to_string(const AnnotationFile& a, const Program& p);

}  // namespace qfc
