#pragma once

#include <map>
#include <string>
#include <vector>

#include "qfc/syntax.hpp"

namespace qfc {

// An expression of a branch body together with the activating left-hand
// side f(p1..pn). Compositional bodies activate with p_i = x_i.
struct ActivationSite {
  std::string fsym;
  std::vector<Expr> patterns;
  Expr expr;
  int branch_index;  // -1 for compositional bodies
};

std::vector<ActivationSite> activation_sites(const Program& p);

// Preorder >=_F generated by "f's body activates a call to g", with
// equivalence classes the SCCs of the direct-call graph.
struct Precedence {
  std::map<std::string, int> scc_of;
  std::vector<std::vector<std::string>> classes;  // indexed by scc id
  std::vector<std::vector<bool>> reaches;         // scc reachability, reflexive

  bool geq(const std::string& f, const std::string& g) const;
  bool equiv(const std::string& f, const std::string& g) const;
  bool gt(const std::string& f, const std::string& g) const;
  // SCC ids in bottom-up topological order (callees before callers).
  std::vector<int> bottom_up() const;
};

Precedence precedence(const Program& p);

// Maximal activated expression split into a context (Hole nodes) and the
// equivalent-symbol calls filling the holes.
struct Fraternity {
  std::string fsym;
  std::vector<Expr> patterns;
  Expr context;              // skeleton with Hole nodes 1..r
  std::vector<Expr> calls;   // Fct applications, calls[i] fills hole i+1
  int branch_index;
};

std::vector<Fraternity> fraternities(const Program& p);
std::vector<Fraternity> fraternities(const Program& p, const Precedence& prec);

// A fraternity is nested when a hole-filling call's arguments mention a
// symbol equivalent to the activator (e.g. f(f(x))). Such programs are
// rejected by the criterion.
std::vector<Diagnostic> detect_nested_fraternities(const Program& p);

// All function symbols appearing anywhere in an expression.
void collect_function_symbols(const Expr& e, std::vector<std::string>& out);

}  // namespace qfc
