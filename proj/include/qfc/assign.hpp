#pragma once

#include <map>
#include <string>
#include <vector>

#include "qfc/eval.hpp"
#include "qfc/maxpoly.hpp"
#include "qfc/syntax.hpp"

namespace qfc {

// Plays the roles of theta (sup-interpretation), omega (weight) and the
// quasi-interpretation map, depending on which checks consume it.
struct AssignmentSet {
  std::map<std::string, MaxPoly> sup;
  std::map<std::string, MaxPoly> weight;
  bool synthesized = false;

  const MaxPoly* find_sup(const std::string& sym) const {
    auto it = sup.find(sym);
    return it == sup.end() ? nullptr : &it->second;
  }
  const MaxPoly* find_weight(const std::string& sym) const {
    auto it = weight.find(sym);
    return it == weight.end() ? nullptr : &it->second;
  }
};

// Deterministic first-occurrence variable numbering shared across the two
// sides of a criterion inequality.
struct VarIndexer {
  std::map<std::string, int> index;
  int next = 0;

  int get(const std::string& var) {
    auto [it, fresh] = index.emplace(var, next);
    if (fresh) ++next;
    return it->second;
  }
  void seed_patterns(const std::vector<Expr>& patterns);
};

struct MissingSymbolError : std::runtime_error {
  std::string symbol;
  explicit MissingSymbolError(const std::string& sym)
      : std::runtime_error("no assignment for symbol '" + sym + "'"),
        symbol(sym) {}
};

// Canonical extension theta*: variables to fresh reals, sequences and Case
// to max, applications to composition. Throws MissingSymbolError for
// symbols outside the assignment's domain.
MaxPoly extend(const AssignmentSet& a, const Expr& e, VarIndexer& vars);

// theta* of a value; Err defaults to 0 unless assigned.
Rat extend_value(const AssignmentSet& a, const Value& v);

// theta*(C) over hole variables: hole i maps to an extra variable appended
// after the pattern variables; substituting arguments is MaxPoly
// composition. hole_base is the index of hole 1.
MaxPoly extend_context(const AssignmentSet& a, const Expr& context,
                       VarIndexer& vars, int hole_base);

struct ConditionProbe {
  std::string symbol;
  int condition;         // 1 = monotone, 2 = size bound, 3 = semantic bound
  std::string status;    // certified | tested | violated | untested
  std::string detail;
  std::vector<Value> witness;
};

struct SupReport {
  std::vector<ConditionProbe> probes;
  bool ok = true;
  long probe_count = 0;
};

// Checks the three sup-interpretation conditions: monotonicity structurally,
// the size bound symbolically for additive assignments (enumerated
// otherwise), the semantic bound by enumerating value tuples of size
// <= size_bound and evaluating with the interpreter as oracle.
SupReport check_sup_conditions(const Program& p, const AssignmentSet& a,
                               long size_bound, EvalBudget budget = {});

struct QiRuleVerdict {
  std::string fsym;
  int branch_index;
  std::string lhs_text;
  std::string rhs_text;
  Verdict verdict;
};

struct QiReport {
  std::vector<QiRuleVerdict> rules;
  std::vector<std::string> property_failures;  // totality/additivity/subterm
  bool ok = true;
};

// Quasi-interpretation check: [[f(p)]] >= [[e]] for every maximal activated
// expression, with the assignment total, additive on constructors, monotone
// and subterm everywhere. dominance_only skips the sampling refuter.
QiReport check_quasi_interpretation(const Program& p,
                                    const std::map<std::string, MaxPoly>& qi,
                                    bool dominance_only = false);

// Enumerates Err-free values over the program's constructors, smallest
// first, up to max_size and max_count.
std::vector<Value> enumerate_values(const Program& p, long max_size,
                                    long max_count);

}  // namespace qfc
