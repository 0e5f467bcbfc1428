#include "qfc/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace qfc {

std::string criterion_status_to_string(CriterionStatus s) {
  switch (s) {
    case CriterionStatus::QuasiFriendly:
      return "quasi-friendly";
    case CriterionStatus::NotQuasiFriendly:
      return "not-quasi-friendly";
    case CriterionStatus::Unknown:
      return "unknown";
    case CriterionStatus::RejectedNested:
      return "rejected-nested";
  }
  return "?";
}

CriterionReport check_quasi_friendly(const Program& p, const AssignmentSet& a,
                                     bool dominance_only) {
  CriterionReport report;
  report.nested = detect_nested_fraternities(p);
  if (!report.nested.empty()) {
    report.status = CriterionStatus::RejectedNested;
    return report;
  }
  Precedence prec = precedence(p);
  bool any_refuted = false, any_unknown = false;
  for (const Fraternity& fr : fraternities(p, prec)) {
    FraternityVerdict fv;
    fv.fsym = fr.fsym;
    fv.branch_index = fr.branch_index;
    try {
      VarIndexer vars;
      vars.seed_patterns(fr.patterns);
      const MaxPoly* wf = a.find_weight(fr.fsym);
      if (!wf) throw MissingSymbolError(fr.fsym + " (weight)");

      std::vector<MaxPoly> pargs;
      for (const Expr& pt : fr.patterns) pargs.push_back(extend(a, pt, vars));
      MaxPoly lhs = fr.patterns.empty() ? *wf : mp_compose(*wf, pargs);
      fv.lhs_text = lhs.to_string();

      // omega_gi(theta*(e_i)) per hole-filling call.
      std::vector<MaxPoly> inner;
      for (const Expr& call : fr.calls) {
        const MaxPoly* wg = a.find_weight(call.sym);
        if (!wg) throw MissingSymbolError(call.sym + " (weight)");
        std::vector<MaxPoly> cargs;
        for (const Expr& arg : call.args)
          cargs.push_back(extend(a, arg, vars));
        inner.push_back(call.args.empty() ? *wg : mp_compose(*wg, cargs));
      }
      MaxPoly rhs1 = mp_max(inner);
      fv.cond1_rhs_text = rhs1.to_string();
      fv.cond1 = compare_geq(lhs, rhs1, false, dominance_only);

      // theta*(C) composed with the inner weights.
      int hole_base = vars.next;
      MaxPoly ctx = extend_context(a, fr.context, vars, hole_base);
      std::vector<MaxPoly> subst;
      for (int i = 0; i < hole_base; ++i)
        subst.push_back(mp_embed(MaxPoly::variable(i), hole_base));
      for (const MaxPoly& w : inner) subst.push_back(w);
      MaxPoly rhs2 = mp_compose(ctx, subst);
      fv.cond2_rhs_text = rhs2.to_string();
      fv.cond2 = compare_geq(lhs, rhs2, false, dominance_only);
    } catch (const MissingSymbolError& e) {
      report.missing.push_back(e.symbol);
      fv.cond1.kind = VerdictKind::Unknown;
      fv.cond2.kind = VerdictKind::Unknown;
      fv.cond1.note = fv.cond2.note = e.what();
    }
    if (fv.cond1.refuted() || fv.cond2.refuted()) any_refuted = true;
    if (fv.cond1.kind == VerdictKind::Unknown ||
        fv.cond2.kind == VerdictKind::Unknown)
      any_unknown = true;
    report.fraternities.push_back(std::move(fv));
  }
  if (any_refuted)
    report.status = CriterionStatus::NotQuasiFriendly;
  else if (any_unknown)
    report.status = CriterionStatus::Unknown;
  else
    report.status = CriterionStatus::QuasiFriendly;
  return report;
}

namespace {

// All posynomials over `arity` variables up to max_degree with coefficients
// drawn from the pools, in the family's three shapes.
void linear_templates(int arity, const WeightFamily& fam, bool require_subterm,
                      std::vector<MaxPoly>& out) {
  // sum a_i X_i + c
  std::vector<size_t> pick(arity, 0);
  while (true) {
    bool subterm_ok = true;
    for (int i = 0; i < arity; ++i)
      if (fam.coefficients[pick[i]] < 1) subterm_ok = false;
    if (!require_subterm || subterm_ok) {
      for (const Rat& c : fam.constants) {
        Poly poly;
        poly.add_term({}, c);
        for (int i = 0; i < arity; ++i)
          poly.add_term({{i, 1}}, fam.coefficients[pick[i]]);
        MaxPoly f;
        f.arity = arity;
        f.branches.push_back(poly);
        out.push_back(normalize(std::move(f)));
      }
    }
    int i = 0;
    for (; i < arity; ++i) {
      if (++pick[i] < fam.coefficients.size()) break;
      pick[i] = 0;
    }
    if (i == arity) break;
  }
}

void max_projection_templates(int arity, const WeightFamily& fam,
                              std::vector<MaxPoly>& out) {
  if (arity == 0) return;
  // max(X_1, ..., X_n) + c
  for (const Rat& c : fam.constants) {
    MaxPoly f;
    f.arity = arity;
    for (int i = 0; i < arity; ++i) {
      Poly b;
      b.add_term({{i, 1}}, 1);
      b.add_term({}, c);
      f.branches.push_back(b);
    }
    out.push_back(normalize(std::move(f)));
  }
}

std::vector<Monomial> monomials_up_to(int arity, int degree) {
  std::vector<Monomial> out;
  std::function<void(int, int, Monomial&)> rec = [&](int var, int left,
                                                     Monomial& m) {
    if (var == arity) {
      if (!m.empty()) out.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      if (e > 0) m[var] = e;
      rec(var + 1, left - e, m);
      if (e > 0) m.erase(var);
    }
  };
  Monomial m;
  rec(0, degree, m);
  return out;
}

void posynomial_templates(int arity, const WeightFamily& fam,
                          bool require_subterm, std::vector<MaxPoly>& out) {
  if (arity == 0) return;
  std::vector<Monomial> mons = monomials_up_to(arity, fam.max_degree);
  // Cap the exponent: with many monomials this explodes, so restrict to
  // plain coefficient pools over at most 6 monomials.
  if (mons.size() > 6) return;
  std::vector<size_t> pick(mons.size(), 0);
  while (true) {
    for (const Rat& c : fam.constants) {
      Poly poly;
      poly.add_term({}, c);
      for (size_t i = 0; i < mons.size(); ++i)
        poly.add_term(mons[i], fam.coefficients[pick[i]]);
      MaxPoly f;
      f.arity = arity;
      f.branches.push_back(poly);
      f = normalize(std::move(f));
      if (require_subterm) {
        // Dominance against each projection; cheap, sound (may skip
        // templates whose subterm property needs semantic reasoning).
        bool subterm = true;
        for (int i = 0; i < arity && subterm; ++i)
          subterm = compare_geq(f, mp_embed(MaxPoly::variable(i), arity),
                                false, true)
                        .valid();
        if (!subterm) continue;
      }
      out.push_back(std::move(f));
    }
    size_t i = 0;
    for (; i < mons.size(); ++i) {
      if (++pick[i] < fam.coefficients.size()) break;
      pick[i] = 0;
    }
    if (i == mons.size()) break;
  }
}

}  // namespace

std::vector<MaxPoly> weight_templates(int arity, const WeightFamily& family,
                                      bool require_subterm) {
  std::vector<MaxPoly> out;
  linear_templates(arity, family, require_subterm, out);
  max_projection_templates(arity, family, out);
  posynomial_templates(arity, family, require_subterm, out);
  // Deduplicate normalized candidates.
  std::vector<MaxPoly> uniq;
  for (MaxPoly& f : out) {
    bool dup = false;
    for (const MaxPoly& g : uniq)
      if (maxpoly_equal(f, g)) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(std::move(f));
  }
  return uniq;
}

WeightSearchResult search_weights(const Program& p,
                                  const std::map<std::string, MaxPoly>& sup,
                                  const WeightFamily& family) {
  WeightSearchResult result;
  AssignmentSet base;
  base.sup = sup;

  Precedence prec = precedence(p);
  std::vector<Fraternity> frs = fraternities(p, prec);
  if (frs.empty()) {
    result.found = base;
    result.best_report = check_quasi_friendly(p, base);
    return result;
  }
  if (!detect_nested_fraternities(p).empty()) {
    result.best_report = check_quasi_friendly(p, base);
    return result;
  }

  // Classes that contain a fraternity need weights; within one class all
  // symbols get candidates from the same family. Classes are independent:
  // both criterion inequalities only mention weights of the activator's
  // class, so each class is solved separately.
  std::set<int> need;
  for (const Fraternity& fr : frs) need.insert(prec.scc_of.at(fr.fsym));

  AssignmentSet solved = base;
  bool all = true;
  for (int cls : prec.bottom_up()) {
    if (!need.count(cls)) continue;
    const std::vector<std::string>& members = prec.classes[cls];
    // Candidate tuples: same template list per member, product across
    // members (classes are usually singletons).
    std::vector<std::vector<MaxPoly>> per_member;
    for (const std::string& m : members) {
      int arity = p.symbols.find(m)->arity;
      per_member.push_back(weight_templates(arity, family, true));
    }
    std::vector<size_t> pick(members.size(), 0);
    bool solved_class = false;
    int class_best_valid = -1;
    std::map<std::string, MaxPoly> class_best;
    while (true) {
      AssignmentSet trial = solved;
      for (size_t i = 0; i < members.size(); ++i)
        trial.weight[members[i]] = per_member[i][pick[i]];
      // Dominance-only verdicts keep the inner loop cheap; only this
      // class's fraternities decide acceptance.
      CriterionReport r = check_quasi_friendly(p, trial, true);
      bool ok = true;
      int valid_count = 0;
      for (const FraternityVerdict& fv : r.fraternities) {
        if (prec.scc_of.at(fv.fsym) != cls) continue;
        if (fv.cond1.valid() && fv.cond2.valid())
          ++valid_count;
        else
          ok = false;
      }
      if (ok) {
        solved = trial;
        solved_class = true;
        break;
      }
      if (valid_count > class_best_valid) {
        class_best_valid = valid_count;
        class_best.clear();
        for (const std::string& m : members) class_best[m] = trial.weight[m];
      }
      size_t i = 0;
      for (; i < members.size(); ++i) {
        if (++pick[i] < per_member[i].size()) break;
        pick[i] = 0;
      }
      if (i == members.size()) break;
    }
    if (!solved_class) {
      all = false;
      // Keep the least-bad candidate so the final report names the
      // obstruction instead of missing entries.
      for (const auto& [m, w] : class_best) solved.weight[m] = w;
    }
  }
  if (all) result.found = solved;
  result.best_report = check_quasi_friendly(p, solved);
  return result;
}

namespace {

std::optional<MaxPoly> bound_of_expr(const Program& p, const Expr& e,
                                     std::map<std::string, MaxPoly>& memo,
                                     const Precedence& prec);

std::optional<MaxPoly> bound_of_symbol(const Program& p, const std::string& f,
                                       std::map<std::string, MaxPoly>& memo,
                                       const Precedence& prec) {
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  const Definition* d = p.find(f);
  if (!d) return std::nullopt;
  // Refuse recursive strata.
  for (const Fraternity& fr : fraternities(p, prec))
    if (prec.equiv(fr.fsym, f)) return std::nullopt;

  std::vector<MaxPoly> branch_bounds;
  auto handle = [&](const Expr& body) -> bool {
    auto b = bound_of_expr(p, body, memo, prec);
    if (!b) return false;
    branch_bounds.push_back(*b);
    return true;
  };
  if (d->body.tag == Expr::Tag::Case) {
    for (const Branch& b : d->body.branches)
      if (!handle(b.body)) return std::nullopt;
  } else {
    if (!handle(d->body)) return std::nullopt;
  }
  MaxPoly bound = mp_max(branch_bounds);
  memo[f] = bound;
  return bound;
}

bool constructor_only(const Expr& e) {
  if (e.tag == Expr::Tag::Var) return true;
  if (e.tag != Expr::Tag::Cns) return false;
  return std::all_of(e.args.begin(), e.args.end(), constructor_only);
}

// |e| with every variable sized X (variable index 0).
MaxPoly literal_size_poly(const Expr& e) {
  if (e.tag == Expr::Tag::Var) return MaxPoly::variable(0);
  MaxPoly acc = MaxPoly::constant(e.args.empty() ? 0 : 1);
  for (const Expr& a : e.args) acc = mp_add(acc, literal_size_poly(a));
  return acc;
}

std::optional<MaxPoly> bound_of_expr(const Program& p, const Expr& e,
                                     std::map<std::string, MaxPoly>& memo,
                                     const Precedence& prec) {
  if (constructor_only(e)) return literal_size_poly(e);
  switch (e.tag) {
    case Expr::Tag::Var:
      return MaxPoly::variable(0);
    case Expr::Tag::Cns: {
      // P_c(X) = nX + 1 composed with the max of argument bounds.
      std::vector<MaxPoly> args;
      for (const Expr& a : e.args) {
        auto b = bound_of_expr(p, a, memo, prec);
        if (!b) return std::nullopt;
        args.push_back(*b);
      }
      MaxPoly inner = mp_max(args);
      MaxPoly pc = mp_add(mp_mul(MaxPoly::constant(static_cast<long>(
                                     e.args.size())),
                                 MaxPoly::variable(0)),
                          MaxPoly::constant(1));
      return mp_compose(pc, {inner});
    }
    case Expr::Tag::Op: {
      // hd/tl/eq never grow their arguments.
      std::vector<MaxPoly> args;
      for (const Expr& a : e.args) {
        auto b = bound_of_expr(p, a, memo, prec);
        if (!b) return std::nullopt;
        args.push_back(*b);
      }
      return mp_max(args);
    }
    case Expr::Tag::Fct: {
      auto pf = bound_of_symbol(p, e.sym, memo, prec);
      if (!pf) return std::nullopt;
      std::vector<MaxPoly> args;
      for (const Expr& a : e.args) {
        auto b = bound_of_expr(p, a, memo, prec);
        if (!b) return std::nullopt;
        args.push_back(*b);
      }
      return mp_compose(*pf, {mp_max(args)});
    }
    case Expr::Tag::Case: {
      std::vector<MaxPoly> parts;
      for (const Branch& b : e.branches) {
        auto bb = bound_of_expr(p, b.body, memo, prec);
        if (!bb) return std::nullopt;
        parts.push_back(*bb);
      }
      return mp_max(parts);
    }
    case Expr::Tag::Hole:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<DerivedBound> derive_bound_nonrecursive(const Program& p,
                                                      const std::string& f) {
  Precedence prec = precedence(p);
  std::map<std::string, MaxPoly> memo;
  auto b = bound_of_symbol(p, f, memo, prec);
  if (!b) return std::nullopt;
  return DerivedBound{f, *b, "non-recursive"};
}

EnvelopeFit fit_envelope(const std::vector<std::pair<long, long>>& obs,
                         int max_degree) {
  EnvelopeFit fit;
  if (obs.empty()) return fit;
  long xmax = 0;
  for (const auto& [x, y] : obs) xmax = std::max(xmax, x);
  long split = std::max<long>(1, xmax / 2);
  // x < 3 would dominate the trained coefficient at high degrees and mask
  // genuine growth; skip them when larger training points exist.
  long xmin_train = 3;
  bool any_large = false;
  for (const auto& [x, y] : obs)
    if (x >= xmin_train && x <= split) any_large = true;
  if (!any_large) xmin_train = 1;

  const double slack = 1.5;
  for (int d = 0; d <= max_degree; ++d) {
    double c = 0;
    bool have_train = false;
    for (const auto& [x, y] : obs) {
      if (x < xmin_train || x > split) continue;
      have_train = true;
      c = std::max(c, y / std::pow(x, d));
    }
    if (!have_train) continue;
    bool ok = true;
    for (const auto& [x, y] : obs) {
      if (x <= split) continue;
      if (static_cast<double>(y) > slack * c * std::pow(x, d) + 1e-9) {
        ok = false;
        break;
      }
    }
    if (ok) {
      fit.covered = true;
      fit.degree = d;
      // Report the coefficient that covers every observation outright.
      double full = 0;
      for (const auto& [x, y] : obs)
        full = std::max(full, y / std::pow(std::max<long>(x, 1), d));
      fit.coefficient = full;
      return fit;
    }
  }
  return fit;
}

namespace {

Value random_term(const Program& p, long target_size, std::mt19937& rng) {
  std::vector<std::pair<std::string, int>> nullary, positive;
  for (const auto& [name, info] : p.symbols.entries) {
    if (info.kind != Kind::Cns) continue;
    (info.arity == 0 ? nullary : positive).emplace_back(name, info.arity);
  }
  std::function<Value(long)> gen = [&](long budget) -> Value {
    if (budget <= 0 || positive.empty() || nullary.empty()) {
      if (!nullary.empty()) {
        auto& [name, ar] = nullary[rng() % nullary.size()];
        Value v;
        v.cons = name;
        return v;
      }
      auto& [name, ar] = positive[rng() % positive.size()];
      Value v;
      v.cons = name;
      for (int i = 0; i < ar; ++i) v.args.push_back(gen(0));
      return v;
    }
    auto& [name, ar] = positive[rng() % positive.size()];
    Value v;
    v.cons = name;
    long child = (budget - 1) / std::max(1, ar);
    for (int i = 0; i < ar; ++i) v.args.push_back(gen(child));
    return v;
  };
  return gen(target_size);
}

bool numeral_vocabulary(const Program& p) {
  const SymbolInfo* z = p.symbols.find("0");
  const SymbolInfo* s = p.symbols.find("S");
  return z && z->kind == Kind::Cns && z->arity == 0 && s &&
         s->kind == Kind::Cns && s->arity == 1;
}

}  // namespace

BoundsReport validate_bounds(const Program& p, const std::string& fsym,
                             const InputGrid& grid, EvalBudget budget,
                             int max_degree) {
  BoundsReport report;
  report.fsym = fsym;
  const SymbolInfo* info = p.symbols.find(fsym);
  if (!info || info->kind != Kind::Fct) return report;
  int n = info->arity;

  // Input tuples: a numeral grid when the vocabulary is unary numerals,
  // random seeded constructor terms otherwise.
  std::vector<std::vector<Value>> inputs;
  if (numeral_vocabulary(p) && n > 0) {
    std::vector<long> sizes;
    for (long i = 1; i <= grid.grid; ++i) sizes.push_back(i);
    std::vector<long> tuple(n, 1);
    while (true) {
      std::vector<Value> args;
      for (long s : tuple) args.push_back(numeral(s));
      inputs.push_back(std::move(args));
      if (static_cast<long>(inputs.size()) >= grid.max_tuples) break;
      int i = 0;
      for (; i < n; ++i) {
        if (++tuple[i] <= grid.grid) break;
        tuple[i] = 1;
      }
      if (i == n) break;
    }
  } else {
    std::mt19937 rng(grid.seed);
    for (long t = 0; t < std::min<long>(grid.max_tuples, 200); ++t) {
      std::vector<Value> args;
      for (int i = 0; i < n; ++i)
        args.push_back(random_term(p, 1 + t % std::max<long>(grid.grid, 2),
                                   rng));
      inputs.push_back(std::move(args));
    }
  }

  for (const std::vector<Value>& args : inputs) {
    BoundObservation row;
    for (const Value& v : args) {
      long s = size_of(v);
      row.input_sizes.push_back(s);
      row.max_input = std::max(row.max_input, s);
    }
    Expr call;
    call.tag = Expr::Tag::Fct;
    call.sym = fsym;
    for (const Value& v : args) call.args.push_back(value_to_expr(v));

    Cache cache;
    CacheStats stats;
    EvalResult r = eval_memo(p, call, cache, stats, budget);
    row.timeout = r.timeout;
    row.output_size = r.timeout ? 0 : size_of(r.value);
    row.cache_entries = stats.entries();

    CallTree tree = trace_call_tree(p, {fsym, args}, budget, 20000);
    for (const State& st : tree.states)
      for (const Value& v : st.args)
        row.max_state_arg = std::max(row.max_state_arg, size_of(v));
    report.rows.push_back(std::move(row));
  }

  std::vector<std::pair<long, long>> outs, states, caches;
  for (const BoundObservation& row : report.rows) {
    if (!row.timeout) outs.emplace_back(row.max_input, row.output_size);
    states.emplace_back(row.max_input, row.max_state_arg);
    caches.emplace_back(row.max_input, row.cache_entries);
  }
  report.output_envelope = fit_envelope(outs, max_degree);
  report.state_envelope = fit_envelope(states, max_degree);
  report.cache_envelope = fit_envelope(caches, 3);
  report.super_polynomial = !report.output_envelope.covered;
  return report;
}

}  // namespace qfc
