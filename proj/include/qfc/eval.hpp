#pragma once

#include <map>
#include <utility>
#include <vector>

#include "qfc/syntax.hpp"

namespace qfc {

struct EvalBudget {
  long max_steps = 1000000;
  // Evaluation recurses on the native stack, so the depth cap has to stay
  // well inside the platform stack size; exceeding it reports Timeout.
  int max_depth = 10000;
};

struct EvalResult {
  bool timeout = false;
  Value value;
};

// (function symbol, argument tuple) -> value; threaded through one top-level
// evaluation.
using Cache = std::map<std::pair<std::string, std::vector<Value>>, Value>;

struct CacheStats {
  long hits = 0;
  long misses = 0;
  long entries() const { return misses; }
};

// Call-by-value evaluation of a ground expression. Err is a value (returned
// when no rule applies); Timeout is the budget running out.
EvalResult eval(const Program& p, const Expr& e, EvalBudget budget = {});

EvalResult eval_memo(const Program& p, const Expr& e, Cache& cache,
                     CacheStats& stats, EvalBudget budget = {});

// Built-in operator semantics: hd, tl, eq. Undefined cases yield Err.
Value builtin_op(const std::string& name, const std::vector<Value>& args);

bool is_builtin_op(const std::string& name, int arity);

struct State {
  std::string fsym;
  std::vector<Value> args;
};

bool operator==(const State& a, const State& b);
bool operator<(const State& a, const State& b);

struct CallTree {
  State root;
  std::vector<State> states;                  // root first
  std::vector<std::pair<State, State>> edges;
  bool truncated = false;
};

// All stack-frame transitions reachable from the root state, breadth-first,
// up to the budget (diverging programs yield a truncated tree).
CallTree trace_call_tree(const Program& p, const State& root,
                         EvalBudget budget = {}, long max_states = 100000);

// Convenience numeral helpers for unary-encoded naturals over S/0.
Value numeral(long n, const std::string& succ = "S",
              const std::string& zero = "0");
long numeral_value(const Value& v, const std::string& succ = "S",
                   const std::string& zero = "0");  // -1 if not a numeral

}  // namespace qfc
