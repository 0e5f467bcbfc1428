#include "qfc/assign.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace qfc {

void VarIndexer::seed_patterns(const std::vector<Expr>& patterns) {
  for (const std::string& v : pattern_vars(patterns)) get(v);
}

MaxPoly extend(const AssignmentSet& a, const Expr& e, VarIndexer& vars) {
  switch (e.tag) {
    case Expr::Tag::Var:
      return MaxPoly::variable(vars.get(e.sym));
    case Expr::Tag::Hole:
      throw MissingSymbolError("<hole>");
    case Expr::Tag::Cns:
    case Expr::Tag::Op:
    case Expr::Tag::Fct: {
      const MaxPoly* f = a.find_sup(e.sym);
      if (!f) throw MissingSymbolError(e.sym);
      if (e.args.empty()) return *f;
      std::vector<MaxPoly> args;
      for (const Expr& arg : e.args) args.push_back(extend(a, arg, vars));
      return mp_compose(*f, args);
    }
    case Expr::Tag::Case: {
      std::vector<MaxPoly> parts;
      for (const Expr& s : e.args) parts.push_back(extend(a, s, vars));
      for (const Branch& b : e.branches) {
        // Pattern variables of the branch become fresh reals.
        for (const std::string& v : pattern_vars(b.patterns)) vars.get(v);
        parts.push_back(extend(a, b.body, vars));
      }
      return mp_max(parts);
    }
  }
  throw MissingSymbolError("<unreachable>");
}

Rat extend_value(const AssignmentSet& a, const Value& v) {
  if (v.err) {
    const MaxPoly* e = a.find_sup("Err");
    return e ? e->eval_at({}) : Rat(0);
  }
  const MaxPoly* f = a.find_sup(v.cons);
  if (!f) throw MissingSymbolError(v.cons);
  std::vector<Rat> args;
  for (const Value& c : v.args) args.push_back(extend_value(a, c));
  return f->eval_at(args);
}

MaxPoly extend_context(const AssignmentSet& a, const Expr& context,
                       VarIndexer& vars, int hole_base) {
  struct Helper {
    const AssignmentSet& a;
    VarIndexer& vars;
    int hole_base;
    MaxPoly run(const Expr& e) {
      if (e.tag == Expr::Tag::Hole)
        return MaxPoly::variable(hole_base + e.hole_index - 1);
      if (e.tag == Expr::Tag::Var) return MaxPoly::variable(vars.get(e.sym));
      if (e.tag == Expr::Tag::Case) throw MissingSymbolError("<case>");
      const MaxPoly* f = a.find_sup(e.sym);
      if (!f) throw MissingSymbolError(e.sym);
      if (e.args.empty()) return *f;
      std::vector<MaxPoly> args;
      for (const Expr& arg : e.args) args.push_back(run(arg));
      return mp_compose(*f, args);
    }
  };
  return Helper{a, vars, hole_base}.run(context);
}

std::vector<Value> enumerate_values(const Program& p, long max_size,
                                    long max_count) {
  std::vector<std::pair<std::string, int>> constructors;
  for (const auto& [name, info] : p.symbols.entries)
    if (info.kind == Kind::Cns) constructors.emplace_back(name, info.arity);

  // Layered enumeration by size.
  std::vector<Value> out;
  std::vector<std::vector<Value>> by_size(max_size + 1);
  for (const auto& [name, ar] : constructors)
    if (ar == 0) {
      Value v;
      v.cons = name;
      by_size[0].push_back(v);
    }
  out.insert(out.end(), by_size[0].begin(), by_size[0].end());
  for (long s = 1; s <= max_size; ++s) {
    for (const auto& [name, ar] : constructors) {
      if (ar == 0) continue;
      // Partition s-1 over ar children.
      std::vector<Value> partial;
      std::function<void(int, long, std::vector<Value>&)> build =
          [&](int slot, long remaining, std::vector<Value>& acc) {
            if (static_cast<long>(out.size()) + by_size[s].size() >
                static_cast<size_t>(max_count))
              return;
            if (slot == ar) {
              if (remaining != 0) return;
              Value v;
              v.cons = name;
              v.args = acc;
              by_size[s].push_back(v);
              return;
            }
            long cap = slot == ar - 1 ? remaining : remaining;
            for (long k = 0; k <= cap; ++k)
              for (const Value& c : by_size[k]) {
                acc.push_back(c);
                build(slot + 1, remaining - k, acc);
                acc.pop_back();
              }
          };
      std::vector<Value> acc;
      build(0, s - 1, acc);
    }
    out.insert(out.end(), by_size[s].begin(), by_size[s].end());
    if (static_cast<long>(out.size()) >= max_count) {
      out.resize(max_count);
      break;
    }
  }
  return out;
}

namespace {

bool is_additive_set(const Program& p, const AssignmentSet& a) {
  for (const auto& [name, info] : p.symbols.entries) {
    if (info.kind != Kind::Cns) continue;
    const MaxPoly* f = a.find_sup(name);
    if (!f || !is_additive_constructor(*f)) return false;
  }
  return true;
}

}  // namespace

SupReport check_sup_conditions(const Program& p, const AssignmentSet& a,
                               long size_bound, EvalBudget budget) {
  SupReport report;
  auto fail = [&](ConditionProbe probe) {
    if (probe.status == "violated") report.ok = false;
    report.probes.push_back(std::move(probe));
  };

  // Condition 1: weak monotonicity, structural.
  for (const auto& [sym, f] : a.sup)
    fail({sym, 1, is_monotone(f) ? "certified" : "violated",
          "nonnegative coefficients", {}});

  // Conditions 2 and 3 interpret values, which needs every constructor in
  // the domain; a partial assignment leaves them untested.
  bool cons_total = true;
  for (const auto& [sym, info] : p.symbols.entries)
    if (info.kind == Kind::Cns && !a.find_sup(sym)) cons_total = false;
  if (!cons_total) {
    fail({"<constructors>", 2, "untested",
          "assignment does not cover all constructors", {}});
    return report;
  }

  // Condition 2: theta*(v) >= |v|.
  bool additive = is_additive_set(p, a);
  std::vector<Value> values = enumerate_values(p, size_bound, 4000);
  if (additive) {
    fail({"<constructors>", 2, "certified",
          "additive assignment: theta*(v) >= |v| holds by induction", {}});
  }
  for (const Value& v : values) {
    Rat tv = extend_value(a, v);
    if (tv < size_of(v)) {
      fail({v.cons, 2, "violated",
            "theta*(v) = " + tv.get_str() + " < |v| = " +
                std::to_string(size_of(v)),
            {v}});
      break;
    }
  }
  if (!additive)
    fail({"<constructors>", 2, "tested",
          "enumerated " + std::to_string(values.size()) + " values", {}});

  // Condition 3: theta*(b(v...)) >= theta*([[b]](v...)) for Fct/Op symbols
  // in the domain, probed by bounded enumeration with the evaluator.
  for (const auto& [sym, f] : a.sup) {
    const SymbolInfo* info = p.symbols.find(sym);
    if (!info || (info->kind != Kind::Fct && info->kind != Kind::Op)) continue;
    int n = info->arity;
    long probes = 0;
    bool violated = false;
    ConditionProbe probe{sym, 3, "tested", "", {}};
    // Tuple enumeration over the value pool, bounded by total size.
    std::vector<size_t> idx(n, 0);
    const long max_probes = 2000;
    std::function<void(int, long)> loop = [&](int slot, long used) {
      if (violated || probes >= max_probes) return;
      if (slot == n) {
        std::vector<Value> args(n);
        for (int i = 0; i < n; ++i) args[i] = values[idx[i]];
        ++probes;
        Value result;
        if (info->kind == Kind::Op) {
          result = builtin_op(sym, args);
        } else {
          Expr call;
          call.tag = Expr::Tag::Fct;
          call.sym = sym;
          for (const Value& v : args) call.args.push_back(value_to_expr(v));
          EvalResult r = eval(p, call, budget);
          if (r.timeout) return;  // untested probe, not a violation
          result = r.value;
        }
        std::vector<Rat> targs;
        for (const Value& v : args) targs.push_back(extend_value(a, v));
        Rat lhs = f.eval_at(targs);
        Rat rhs = extend_value(a, result);
        if (lhs < rhs) {
          violated = true;
          probe.status = "violated";
          probe.detail = "theta*(" + sym + "(args)) = " + lhs.get_str() +
                         " < theta*(result) = " + rhs.get_str();
          probe.witness = args;
        }
        return;
      }
      for (size_t i = 0; i < values.size(); ++i) {
        long s = size_of(values[i]);
        if (used + s > size_bound) continue;
        idx[slot] = i;
        loop(slot + 1, used + s);
        if (violated || probes >= max_probes) return;
      }
    };
    loop(0, 0);
    if (!violated)
      probe.detail = "no violation over " + std::to_string(probes) + " probes";
    report.probe_count += probes;
    fail(std::move(probe));
  }
  return report;
}

QiReport check_quasi_interpretation(const Program& p,
                                    const std::map<std::string, MaxPoly>& qi,
                                    bool dominance_only) {
  QiReport report;
  // Totality + structural properties.
  for (const auto& [name, info] : p.symbols.entries) {
    if (info.kind == Kind::Var) continue;
    auto it = qi.find(name);
    if (it == qi.end()) {
      report.property_failures.push_back("missing entry for " + name);
      report.ok = false;
      continue;
    }
    const MaxPoly& f = it->second;
    if (info.kind == Kind::Cns && !is_additive_constructor(f)) {
      report.property_failures.push_back("non-additive constructor " + name);
      report.ok = false;
    }
    if (info.arity > 0) {
      MaxPoly embedded = mp_embed(f, info.arity);
      if (!has_subterm_property(embedded).valid()) {
        report.property_failures.push_back("no subterm property for " + name);
        report.ok = false;
      }
    }
  }
  if (!report.ok) return report;

  AssignmentSet as;
  as.sup = qi;
  for (const Definition& d : p.defs) {
    auto check_rule = [&](const std::vector<Expr>& pats, const Expr& body,
                          int branch) {
      VarIndexer vars;
      vars.seed_patterns(pats);
      const MaxPoly* ff = as.find_sup(d.fsym);
      if (!ff) return;
      std::vector<MaxPoly> pargs;
      for (const Expr& pt : pats) pargs.push_back(extend(as, pt, vars));
      MaxPoly lhs = pats.empty() ? *ff : mp_compose(*ff, pargs);
      MaxPoly rhs = extend(as, body, vars);
      QiRuleVerdict rv;
      rv.fsym = d.fsym;
      rv.branch_index = branch;
      rv.lhs_text = lhs.to_string();
      rv.rhs_text = rhs.to_string();
      rv.verdict = compare_geq(lhs, rhs, false, dominance_only);
      if (!rv.verdict.valid()) report.ok = false;
      report.rules.push_back(std::move(rv));
    };
    if (d.body.tag == Expr::Tag::Case) {
      for (size_t j = 0; j < d.body.branches.size(); ++j)
        check_rule(d.body.branches[j].patterns, d.body.branches[j].body,
                   static_cast<int>(j));
    } else {
      std::vector<Expr> pats;
      for (const std::string& x : d.params) {
        Expr v;
        v.tag = Expr::Tag::Var;
        v.sym = x;
        pats.push_back(v);
      }
      check_rule(pats, d.body, -1);
    }
  }
  return report;
}

}  // namespace qfc
