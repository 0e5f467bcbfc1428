// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qfc/assign.hpp"
#include "qfc/callgraph.hpp"
#include "qfc/criterion.hpp"
#include "qfc/eval.hpp"
#include "qfc/maxpoly.hpp"
#include "qfc/parser.hpp"
#include "qfc/rpo.hpp"
#include "qfc/synth.hpp"

using namespace qfc;

namespace {

// Tolerance for double-precision spot checks of exact Valid verdicts.
constexpr double kSampleTol = 1e-9;
// Wall-clock budgets, pinned per criterion.
constexpr long kDivGridSeconds = 5;
constexpr long kSynthSeconds = 60;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Expr numeral_call(const Program& p, const std::string& f,
                  const std::vector<long>& nums) {
  std::string s = f + "(";
  for (size_t i = 0; i < nums.size(); ++i) {
    if (i) s += ", ";
    s += expr_to_string(value_to_expr(numeral(nums[i])));
  }
  return parse_expression(s + ")", p);
}

// 1. Division semantics over the full grid, under a wall-clock budget.
Outcome criterion1() {
  Outcome out;
  Program p = load_corpus("div.fp");
  long t0 = now_ms();
  for (long n = 1; n <= 40; ++n)
    for (long m = 1; m <= n; ++m) {
      EvalResult r = eval(p, numeral_call(p, "q", {n, m}));
      long want = (n + m - 1) / m;
      if (r.timeout || numeral_value(r.value) != want) {
        out.fail("q(" + std::to_string(n) + "," + std::to_string(m) +
                 ") != " + std::to_string(want));
        return out;
      }
    }
  long elapsed = now_ms() - t0;
  if (elapsed >= kDivGridSeconds * 1000)
    out.fail("grid took " + std::to_string(elapsed) + "ms");
  return out;
}

// 2. Positive instances: every condition verdict exactly Valid.
Outcome criterion2() {
  Outcome out;
  for (const char* base : {"div", "treediv"}) {
    Program p = load_corpus(std::string(base) + ".fp");
    AssignmentSet a = to_assignment(load_ann(std::string(base) + ".ann", p));
    CriterionReport rep = check_quasi_friendly(p, a);
    if (rep.status != CriterionStatus::QuasiFriendly)
      out.fail(std::string(base) + ": " +
               criterion_status_to_string(rep.status));
    for (const auto& f : rep.fraternities) {
      if (!f.cond1.valid())
        out.fail(std::string(base) + " " + f.fsym + " cond1 not Valid");
      if (!f.cond2.valid())
        out.fail(std::string(base) + " " + f.fsym + " cond2 not Valid");
    }
  }
  return out;
}

// 3. Negative instances: weight search fails for exp; the growing-argument
// program refutes condition 1 with a witness but satisfies condition 2.
Outcome criterion3() {
  Outcome out;
  {
    Program p = load_corpus("expdouble.fp");
    AnnotationFile ann = load_ann("expdouble.ann", p);
    WeightSearchResult ws = search_weights(p, ann.sup);
    if (ws.found.has_value()) out.fail("exp: weight search found weights");
    if (ws.best_report.status != CriterionStatus::NotQuasiFriendly)
      out.fail("exp: best report is not a refutation");
  }
  {
    Program p = load_corpus("growing.fp");
    AssignmentSet a = to_assignment(load_ann("growing.ann", p));
    CriterionReport rep = check_quasi_friendly(p, a);
    bool saw_f = false;
    for (const auto& f : rep.fraternities) {
      if (f.fsym != "f") continue;
      saw_f = true;
      if (!f.cond1.refuted() || f.cond1.witness.empty())
        out.fail("growing arg: cond1 not Refuted with witness");
      if (!f.cond2.valid()) out.fail("growing arg: cond2 not Valid");
    }
    if (!saw_f) out.fail("growing arg: no fraternity for f");
  }
  return out;
}

// 4. Division admits no quasi-interpretation in the default family.
Outcome criterion4() {
  Outcome out;
  Program p = load_corpus("div.fp");
  long t0 = now_ms();
  SynthResult res = synthesize_qi(p);
  long elapsed = now_ms() - t0;
  if (res.found.has_value()) out.fail("synthesis found a candidate");
  if (res.timed_out) out.fail("synthesis timed out instead of exhausting");
  if (elapsed >= kSynthSeconds * 1000)
    out.fail("took " + std::to_string(elapsed) + "ms");
  return out;
}

// 5. A synthesized QI reused as sup and weight passes both checks.
Outcome criterion5() {
  Outcome out;
  Program p = load_corpus("minus.fp");
  SynthResult res = synthesize_qi(p);
  if (!res.found.has_value()) {
    out.fail("no QI synthesized for minus");
    return out;
  }
  AssignmentSet a = qi_to_supinterpretation(res.found->sup);
  SupReport sup = check_sup_conditions(p, a, 20);
  if (!sup.ok) out.fail("sup-interpretation probes failed");
  for (const auto& probe : sup.probes)
    if (probe.status == "violated") out.fail(probe.symbol + ": " + probe.detail);
  if (check_quasi_friendly(p, a).status != CriterionStatus::QuasiFriendly)
    out.fail("QI does not make the program quasi-friendly");
  return out;
}

// 6. Size bounds of additive assignments, exact rational arithmetic.
Outcome criterion6() {
  Outcome out;
  long violations = 0, checks = 0;
  for (const char* base : {"div", "treediv"}) {
    Program p = load_corpus(std::string(base) + ".fp");
    AssignmentSet a = to_assignment(load_ann(std::string(base) + ".ann", p));
    for (const Value& v : enumerate_values(p, 25, 2000)) {
      ++checks;
      if (Rat(size_of(v)) > extend_value(a, v)) ++violations;
    }
    // ground calls: |[[e]]| <= theta*([[e]]) <= theta*(e)
    std::vector<Value> args = enumerate_values(p, 8, 300);
    for (const Definition& d : p.defs) {
      if (d.params.size() != 2) continue;
      if (!a.find_sup(d.fsym)) continue;  // the sup assignment is partial
      for (const Value& v1 : args)
        for (const Value& v2 : args) {
          if (1 + size_of(v1) + size_of(v2) > 25) continue;
          Expr e;
          e.tag = Expr::Tag::Fct;
          e.sym = d.fsym;
          e.args = {value_to_expr(v1), value_to_expr(v2)};
          EvalResult r = eval(p, e);
          if (r.timeout) continue;
          ++checks;
          VarIndexer vars;
          Rat call = extend(a, e, vars).eval_at({});
          Rat got = extend_value(a, r.value);
          if (Rat(size_of(r.value)) > got || got > call) ++violations;
        }
    }
  }
  if (violations != 0)
    out.fail(std::to_string(violations) + "/" + std::to_string(checks) +
             " bound violations");
  if (checks < 1000) out.fail("too few probes: " + std::to_string(checks));
  return out;
}

// 7. Call-tree argument sizes: bounded for division, unbounded growth for
// the criterion-failing program.
Outcome criterion7() {
  Outcome out;
  {
    Program p = load_corpus("div.fp");
    for (long n = 1; n <= 40; ++n)
      for (long m = 1; m <= n; ++m) {
        CallTree t = trace_call_tree(p, State{"q", {numeral(n), numeral(m)}});
        for (const State& s : t.states)
          for (const Value& v : s.args)
            if (size_of(v) > n) {
              out.fail("state arg " + std::to_string(size_of(v)) +
                       " exceeds input " + std::to_string(n));
              return out;
            }
      }
  }
  {
    Program p = load_corpus("growing.fp");
    EvalBudget b;
    b.max_steps = 20000;
    for (long n = 1; n <= 3; ++n) {
      CallTree t = trace_call_tree(p, State{"f", {numeral(n)}}, b, 30);
      std::map<std::string, int> depth;  // keyed by rendered state
      auto key = [](const State& s) {
        std::string k = s.fsym;
        for (const Value& v : s.args) k += "|" + value_to_string(v);
        return k;
      };
      depth[key(t.root)] = 0;
      bool grew = false;
      for (const auto& [from, to] : t.edges) {
        auto it = depth.find(key(from));
        if (it == depth.end()) continue;
        int d = it->second + 1;
        auto [jt, fresh] = depth.emplace(key(to), d);
        if (!fresh) jt->second = std::min(jt->second, d);
        if (d <= 5)
          for (const Value& v : to.args)
            if (size_of(v) > 2 * n) grew = true;
      }
      if (!grew) {
        out.fail("no state arg above 2x input within 5 transitions (n=" +
                 std::to_string(n) + ")");
        return out;
      }
    }
  }
  return out;
}

// 8. Exponential outputs are flagged: no degree <= 4 envelope covers exp.
Outcome criterion8() {
  Outcome out;
  Program p = load_corpus("expdouble.fp");
  EvalBudget b;
  b.max_steps = 10000000;
  for (long n = 0; n <= 12; ++n) {
    EvalResult r = eval(p, numeral_call(p, "exp", {n}), b);
    if (r.timeout || numeral_value(r.value) != (1L << n)) {
      out.fail("exp(" + std::to_string(n) + ") != 2^n");
      return out;
    }
  }
  InputGrid grid;
  grid.grid = 12;
  BoundsReport rep = validate_bounds(p, "exp", grid, b);
  if (rep.output_envelope.covered)
    out.fail("degree <= 4 envelope claimed to cover 2^n");
  if (!rep.super_polynomial) out.fail("super-polynomial flag not raised");
  return out;
}

// 9. Memoization agrees with plain evaluation, and memo-table growth is
// polynomial on programs that pass both the criterion and the product-status
// path ordering.
Outcome criterion9() {
  Outcome out;
  struct Entry {
    const char* file;
    const char* fsym;
    int arity;
    long max_input;
  };
  std::vector<Entry> entries = {{"minus.fp", "minus", 2, 25},
                                {"double.fp", "double", 1, 25},
                                {"div.fp", "q", 2, 25},
                                {"expdouble.fp", "exp", 1, 12},
                                {"const.fp", "two", 1, 25}};
  EvalBudget b;
  b.max_steps = 10000000;
  for (const Entry& ent : entries) {
    Program p = load_corpus(ent.file);
    for (long n = 1; n <= ent.max_input; n += 3) {
      std::vector<long> args(ent.arity, n);
      Expr e = numeral_call(p, ent.fsym, args);
      EvalResult plain = eval(p, e, b);
      if (plain.timeout) continue;
      Cache cache;
      CacheStats stats;
      EvalResult memo = eval_memo(p, e, cache, stats, b);
      if (memo.timeout || !(memo.value == plain.value)) {
        out.fail(std::string(ent.fsym) + "(" + std::to_string(n) +
                 "): memo disagrees");
        return out;
      }
    }
  }
  // cache growth on criterion-passing, product-ordered programs
  for (const Entry& ent : entries) {
    Program p = load_corpus(ent.file);
    SynthResult qi = synthesize_qi(p);
    if (!qi.found.has_value()) continue;
    if (check_quasi_friendly(p, *qi.found).status !=
        CriterionStatus::QuasiFriendly)
      continue;
    OrderReport ord = check_program_ordered(p);
    if (!ord.ordered) continue;
    bool all_product = true;
    for (const auto& [sym, s] : ord.statuses)
      if (s != Status::Product) all_product = false;
    if (!all_product) continue;
    std::vector<std::pair<long, long>> obs;
    for (long n = 1; n <= 20; ++n) {
      std::vector<long> args(ent.arity, n);
      Cache cache;
      CacheStats stats;
      EvalResult r = eval_memo(p, numeral_call(p, ent.fsym, args), cache,
                               stats, b);
      if (r.timeout) continue;
      obs.emplace_back(n, long(cache.size()));
    }
    EnvelopeFit fit = fit_envelope(obs, 3);
    if (!fit.covered)
      out.fail(std::string(ent.fsym) + ": cache growth above degree 3");
  }
  return out;
}

MpExpr random_mpexpr(std::mt19937& rng, int depth, int arity) {
  MpExpr e;
  int pick = depth == 0 ? int(rng() % 2) : int(rng() % 5);
  switch (pick) {
    case 0:
      e.tag = MpExpr::Tag::Const;
      e.value = Rat(long(rng() % 4), 1 + long(rng() % 2));
      e.value.canonicalize();
      return e;
    case 1:
      e.tag = MpExpr::Tag::Var;
      e.var = int(rng() % arity);
      return e;
    default:
      e.tag = pick == 2   ? MpExpr::Tag::Add
              : pick == 3 ? MpExpr::Tag::Mul
                          : MpExpr::Tag::Max;
      e.args = {random_mpexpr(rng, depth - 1, arity),
                random_mpexpr(rng, depth - 1, arity)};
      return e;
  }
}

// 10. Inequality engine soundness on randomized instances.
Outcome criterion10() {
  Outcome out;
  constexpr int kInstances = 10000;
  constexpr int kPoints = 10000;
  std::mt19937 rng(97);
  // one shared point cloud per arity, mixing small and large coordinates
  std::map<int, std::vector<std::vector<double>>> clouds;
  for (int arity = 1; arity <= 3; ++arity) {
    auto& pts = clouds[arity];
    pts.reserve(kPoints);
    std::uniform_real_distribution<double> small(0.0, 2.0), big(0.0, 500.0);
    for (int i = 0; i < kPoints; ++i) {
      std::vector<double> x(arity);
      for (auto& xi : x) xi = (i % 3 == 0) ? big(rng) : small(rng);
      pts.push_back(x);
    }
  }
  long unsound = 0, valid_count = 0, refuted_count = 0;
  for (int i = 0; i < kInstances; ++i) {
    int arity = 1 + int(rng() % 3);
    MaxPoly a = normalize(random_mpexpr(rng, 2, arity), arity);
    MaxPoly b = normalize(random_mpexpr(rng, 2, arity), arity);
    bool strict = rng() % 2;
    Verdict v = compare_geq(a, b, strict, false, rng());
    if (v.valid()) {
      ++valid_count;
      for (const auto& x : clouds[arity]) {
        double l = a.eval_double(x), r = b.eval_double(x);
        double tol = kSampleTol * (1.0 + std::fabs(l));
        if (strict ? l + tol <= r : l + tol < r) {
          ++unsound;
          break;
        }
      }
    } else if (v.refuted()) {
      ++refuted_count;
      if (int(v.witness.size()) != arity) {
        ++unsound;
        continue;
      }
      Rat l = a.eval_at(v.witness), r = b.eval_at(v.witness);
      bool violates = strict ? l <= r : l < r;
      if (!violates) ++unsound;
    }
  }
  if (unsound != 0) out.fail(std::to_string(unsound) + " unsound verdicts");
  if (valid_count == 0 || refuted_count == 0)
    out.fail("degenerate instance mix");
  return out;
}

}  // namespace

int main() {
  std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    if (out.pass) {
      std::printf("criterion %zu: PASS\n", i + 1);
    } else {
      std::printf("criterion %zu: FAIL (%s)\n", i + 1, out.detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
