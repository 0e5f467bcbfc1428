#include "qfc/eval.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace qfc {

namespace {

struct TimeoutSignal {};

struct Evaluator {
  const Program& p;
  EvalBudget budget;
  long steps = 0;
  Cache* cache = nullptr;
  CacheStats* stats = nullptr;

  void tick(int depth) {
    if (++steps > budget.max_steps || depth > budget.max_depth)
      throw TimeoutSignal{};
  }

  Value eval_expr(const Expr& e, const Substitution& env, int depth) {
    tick(depth);
    switch (e.tag) {
      case Expr::Tag::Var: {
        auto it = env.find(e.sym);
        if (it == env.end()) return Value::make_err();
        return it->second;
      }
      case Expr::Tag::Cns: {
        Value v;
        v.cons = e.sym;
        for (const Expr& a : e.args) {
          Value av = eval_expr(a, env, depth + 1);
          if (av.err) return Value::make_err();
          v.args.push_back(std::move(av));
        }
        return v;
      }
      case Expr::Tag::Op: {
        std::vector<Value> args;
        for (const Expr& a : e.args) {
          Value av = eval_expr(a, env, depth + 1);
          if (av.err) return Value::make_err();
          args.push_back(std::move(av));
        }
        return builtin_op(e.sym, args);
      }
      case Expr::Tag::Fct: {
        std::vector<Value> args;
        for (const Expr& a : e.args) {
          Value av = eval_expr(a, env, depth + 1);
          if (av.err) return Value::make_err();
          args.push_back(std::move(av));
        }
        return apply(e.sym, args, depth);
      }
      case Expr::Tag::Case: {
        std::vector<Value> scruts;
        for (const Expr& s : e.args) {
          Value sv = eval_expr(s, env, depth + 1);
          if (sv.err) return Value::make_err();
          scruts.push_back(std::move(sv));
        }
        for (const Branch& b : e.branches) {
          auto sigma = match(b.patterns, scruts);
          if (!sigma) continue;
          Substitution inner = env;
          for (auto& [k, v] : *sigma) inner[k] = v;
          return eval_expr(b.body, inner, depth + 1);
        }
        return Value::make_err();  // no branch matches
      }
      case Expr::Tag::Hole:
        return Value::make_err();
    }
    return Value::make_err();
  }

  Value apply(const std::string& fsym, const std::vector<Value>& args,
              int depth) {
    if (cache) {
      auto key = std::make_pair(fsym, args);
      auto it = cache->find(key);
      if (it != cache->end()) {
        if (stats) ++stats->hits;
        return it->second;
      }
    }
    const Definition* d = p.find(fsym);
    if (!d) return Value::make_err();
    Substitution env;
    for (size_t i = 0; i < d->params.size(); ++i) env[d->params[i]] = args[i];
    Value out = eval_expr(d->body, env, depth + 1);
    if (cache) {
      if (stats) ++stats->misses;
      cache->emplace(std::make_pair(fsym, args), out);
    }
    return out;
  }
};

}  // namespace

EvalResult eval(const Program& p, const Expr& e, EvalBudget budget) {
  Evaluator ev{p, budget};
  try {
    return {false, ev.eval_expr(e, {}, 0)};
  } catch (const TimeoutSignal&) {
    return {true, Value::make_err()};
  }
}

EvalResult eval_memo(const Program& p, const Expr& e, Cache& cache,
                     CacheStats& stats, EvalBudget budget) {
  Evaluator ev{p, budget};
  ev.cache = &cache;
  ev.stats = &stats;
  try {
    return {false, ev.eval_expr(e, {}, 0)};
  } catch (const TimeoutSignal&) {
    return {true, Value::make_err()};
  }
}

bool is_builtin_op(const std::string& name, int arity) {
  return (name == "hd" && arity == 1) || (name == "tl" && arity == 1) ||
         (name == "eq" && arity == 2);
}

Value builtin_op(const std::string& name, const std::vector<Value>& args) {
  if (name == "hd" && args.size() == 1) {
    const Value& v = args[0];
    if (v.err || v.args.empty()) return Value::make_err();
    return v.args[0];
  }
  if (name == "tl" && args.size() == 1) {
    const Value& v = args[0];
    if (v.err || v.args.size() < 2) return Value::make_err();
    if (v.args.size() == 2) return v.args[1];
    // Wider constructors: re-nest the remaining children to the right.
    Value acc = v.args.back();
    for (size_t i = v.args.size() - 2; i >= 1; --i) {
      Value node;
      node.cons = v.cons;
      node.args = {v.args[i], std::move(acc)};
      acc = std::move(node);
      if (i == 1) break;
    }
    return acc;
  }
  if (name == "eq" && args.size() == 2) {
    if (args[0].err || args[1].err) return Value::make_err();
    Value v;
    v.cons = args[0] == args[1] ? "True" : "False";
    return v;
  }
  return Value::make_err();
}

bool operator==(const State& a, const State& b) {
  return a.fsym == b.fsym && a.args == b.args;
}

bool operator<(const State& a, const State& b) {
  if (a.fsym != b.fsym) return a.fsym < b.fsym;
  return std::lexicographical_compare(
      a.args.begin(), a.args.end(), b.args.begin(), b.args.end(),
      [](const Value& x, const Value& y) { return x < y; });
}

namespace {

// Every function-application subexpression of a branch body (the activated
// calls of the matched branch).
void collect_calls(const Expr& e, std::vector<const Expr*>& out) {
  if (e.tag == Expr::Tag::Fct) out.push_back(&e);
  for (const Expr& a : e.args) collect_calls(a, out);
  for (const Branch& b : e.branches) collect_calls(b.body, out);
}

}  // namespace

CallTree trace_call_tree(const Program& p, const State& root,
                         EvalBudget budget, long max_states) {
  CallTree tree;
  tree.root = root;
  std::set<State> seen;
  std::deque<State> queue;
  queue.push_back(root);
  seen.insert(root);
  tree.states.push_back(root);
  long expansion_budget = max_states;

  while (!queue.empty()) {
    State cur = queue.front();
    queue.pop_front();
    if (--expansion_budget < 0) {
      tree.truncated = true;
      break;
    }
    const Definition* d = p.find(cur.fsym);
    if (!d) continue;
    // Select the matched branch and its substitution.
    std::optional<Substitution> sigma;
    const Expr* body = nullptr;
    if (d->body.tag == Expr::Tag::Case) {
      for (const Branch& b : d->body.branches) {
        sigma = match(b.patterns, cur.args);
        if (sigma) {
          body = &b.body;
          break;
        }
      }
      if (!sigma) continue;  // Err branch: no frames pushed
    } else {
      Substitution env;
      for (size_t i = 0; i < d->params.size(); ++i)
        env[d->params[i]] = cur.args[i];
      sigma = env;
      body = &d->body;
    }
    std::vector<const Expr*> calls;
    collect_calls(*body, calls);
    for (const Expr* call : calls) {
      State next;
      next.fsym = call->sym;
      bool ok = true;
      for (const Expr& arg : call->args) {
        // Argument expressions may themselves contain calls; evaluate them
        // under the matched substitution.
        EvalResult r = [&] {
          Evaluator ev{p, budget};
          try {
            return EvalResult{false, ev.eval_expr(arg, *sigma, 0)};
          } catch (const TimeoutSignal&) {
            return EvalResult{true, Value::make_err()};
          }
        }();
        if (r.timeout) {
          tree.truncated = true;
          ok = false;
          break;
        }
        if (r.value.err) {
          ok = false;  // transition requires argument values
          break;
        }
        next.args.push_back(std::move(r.value));
      }
      if (!ok) continue;
      tree.edges.emplace_back(cur, next);
      if (seen.insert(next).second) {
        tree.states.push_back(next);
        queue.push_back(next);
        if (static_cast<long>(tree.states.size()) > max_states) {
          tree.truncated = true;
          queue.clear();
          break;
        }
      }
    }
  }
  if (!queue.empty()) tree.truncated = true;
  return tree;
}

Value numeral(long n, const std::string& succ, const std::string& zero) {
  Value v;
  v.cons = zero;
  for (long i = 0; i < n; ++i) {
    Value s;
    s.cons = succ;
    s.args = {std::move(v)};
    v = std::move(s);
  }
  return v;
}

long numeral_value(const Value& v, const std::string& succ,
                   const std::string& zero) {
  const Value* cur = &v;
  long n = 0;
  while (true) {
    if (cur->err) return -1;
    if (cur->cons == zero && cur->args.empty()) return n;
    if (cur->cons == succ && cur->args.size() == 1) {
      ++n;
      cur = &cur->args[0];
      continue;
    }
    return -1;
  }
}

}  // namespace qfc
