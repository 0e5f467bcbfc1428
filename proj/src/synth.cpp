#include "qfc/synth.hpp"

#include <algorithm>

#include "qfc/callgraph.hpp"

namespace qfc {

namespace {

using Clock = std::chrono::steady_clock;
using QiMap = std::map<std::string, MaxPoly>;

std::vector<MaxPoly> additive_candidates(int arity, const TemplateFamily& fam) {
  std::vector<MaxPoly> out;
  for (const Rat& c : fam.constants) {
    if (arity > 0 && c < 1) continue;
    Poly poly;
    poly.add_term({}, c);
    for (int i = 0; i < arity; ++i) poly.add_term({{i, 1}}, 1);
    MaxPoly f;
    f.arity = arity;
    f.branches.push_back(poly);
    out.push_back(normalize(std::move(f)));
  }
  return out;
}

std::vector<MaxPoly> op_candidates(int arity, const TemplateFamily& fam) {
  // max(X1,...,Xn) + c covers the size-nonincreasing builtins.
  std::vector<MaxPoly> out;
  for (const Rat& c : fam.constants) {
    MaxPoly f;
    f.arity = arity;
    if (arity == 0) {
      Poly b;
      b.add_term({}, c);
      f.branches.push_back(b);
    } else {
      for (int i = 0; i < arity; ++i) {
        Poly b;
        b.add_term({{i, 1}}, 1);
        b.add_term({}, c);
        f.branches.push_back(b);
      }
    }
    out.push_back(normalize(std::move(f)));
  }
  return out;
}

// a pointwise <= b over the shared domain, some entry possibly strict.
bool map_leq(const QiMap& a, const QiMap& b) {
  for (const auto& [sym, fa] : a) {
    auto it = b.find(sym);
    if (it == b.end()) return false;
    if (!compare_geq(it->second, fa, false, true).valid()) return false;
  }
  return true;
}

// Keeps dominance-minimal maps, at most cap of them, preferring the order
// in which they were generated (search determinism).
std::vector<QiMap> prune_minimal(std::vector<QiMap> maps, int cap) {
  std::vector<QiMap> kept;
  for (QiMap& m : maps) {
    bool dominated = false;
    for (const QiMap& k : kept)
      if (map_leq(k, m)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    std::erase_if(kept, [&](const QiMap& k) { return map_leq(m, k); });
    kept.push_back(std::move(m));
    if (static_cast<int>(kept.size()) >= cap) break;
  }
  return kept;
}

struct RuleCheck {
  std::string fsym;
  int branch_index;
  std::string lhs_text, rhs_text;
  Verdict verdict;
};

// Dominance-only screen of the rules defining the given symbols. Unknown
// verdicts reject the candidate.
bool class_rules_ok(const Program& p, const QiMap& qi,
                    const std::vector<std::string>& members,
                    std::vector<RuleCheck>* record) {
  AssignmentSet a;
  a.sup = qi;
  bool ok = true;
  for (const Definition& d : p.defs) {
    if (std::find(members.begin(), members.end(), d.fsym) == members.end())
      continue;
    auto check_rule = [&](const std::vector<Expr>& patterns, const Expr& body,
                          int branch_index) {
      RuleCheck rc;
      rc.fsym = d.fsym;
      rc.branch_index = branch_index;
      try {
        VarIndexer vars;
        vars.seed_patterns(patterns);
        std::vector<MaxPoly> pats;
        for (const Expr& pt : patterns) pats.push_back(extend(a, pt, vars));
        const MaxPoly& qf = qi.at(d.fsym);
        MaxPoly lhs = pats.empty() ? qf : mp_compose(qf, pats);
        MaxPoly rhs = extend(a, body, vars);
        rc.lhs_text = lhs.to_string();
        rc.rhs_text = rhs.to_string();
        rc.verdict = compare_geq(lhs, rhs, false, true);
      } catch (const MissingSymbolError& e) {
        rc.verdict.kind = VerdictKind::Unknown;
        rc.verdict.note = e.what();
      }
      if (!rc.verdict.valid()) ok = false;
      if (record) record->push_back(std::move(rc));
    };
    std::vector<Expr> head_pats;
    for (const std::string& x : d.params) {
      Expr v;
      v.tag = Expr::Tag::Var;
      v.sym = x;
      head_pats.push_back(v);
    }
    if (d.body.tag != Expr::Tag::Case) {
      check_rule(head_pats, d.body, -1);
      continue;
    }
    int bi = 0;
    for (const Branch& b : d.body.branches) {
      std::vector<Expr> pats = head_pats;
      for (size_t s = 0; s < d.body.args.size(); ++s)
        for (size_t i = 0; i < d.params.size(); ++i)
          if (d.params[i] == d.body.args[s].sym) pats[i] = b.patterns[s];
      check_rule(pats, b.body, bi++);
    }
  }
  return ok;
}

}  // namespace

SynthResult synthesize_qi(const Program& p, const TemplateFamily& fam,
                          std::chrono::milliseconds timeout) {
  SynthResult result;
  auto deadline = Clock::now() + timeout;
  auto expired = [&] { return Clock::now() > deadline; };

  // Stratum lists: constructors and builtins first, then function classes
  // bottom-up. Each stratum carries its members and per-member candidates.
  struct Stratum {
    std::vector<std::string> members;
    std::vector<std::vector<MaxPoly>> candidates;
    bool has_rules = false;
  };
  std::vector<Stratum> strata;
  Stratum base;
  for (const auto& [name, info] : p.symbols.entries) {
    if (info.kind == Kind::Cns) {
      base.members.push_back(name);
      base.candidates.push_back(additive_candidates(info.arity, fam));
    } else if (info.kind == Kind::Op) {
      base.members.push_back(name);
      base.candidates.push_back(op_candidates(info.arity, fam));
    }
  }
  strata.push_back(std::move(base));

  WeightFamily wf;
  wf.coefficients = fam.coefficients;
  wf.constants = fam.constants;
  wf.max_degree = fam.max_degree;
  Precedence prec = precedence(p);
  for (int cls : prec.bottom_up()) {
    Stratum s;
    s.members = prec.classes[cls];
    s.has_rules = true;
    for (const std::string& f : s.members) {
      int arity = p.symbols.find(f)->arity;
      s.candidates.push_back(weight_templates(arity, wf, true));
    }
    strata.push_back(std::move(s));
  }

  std::vector<QiMap> partials = {{}};
  std::vector<RuleCheck> best_fail;
  int best_valid = -1;
  for (const Stratum& s : strata) {
    std::vector<QiMap> next;
    for (const QiMap& partial : partials) {
      std::vector<size_t> pick(s.members.size(), 0);
      if (s.members.empty()) {
        next.push_back(partial);
        continue;
      }
      while (!expired()) {
        QiMap trial = partial;
        for (size_t i = 0; i < s.members.size(); ++i)
          trial[s.members[i]] = s.candidates[i][pick[i]];
        ++result.candidates_screened;
        std::vector<RuleCheck> record;
        bool ok = !s.has_rules ||
                  class_rules_ok(p, trial, s.members, &record);
        if (ok) {
          next.push_back(std::move(trial));
        } else {
          int valid = 0;
          for (const RuleCheck& rc : record)
            if (rc.verdict.valid()) ++valid;
          if (valid > best_valid) {
            best_valid = valid;
            best_fail = std::move(record);
          }
        }
        size_t i = 0;
        for (; i < s.members.size(); ++i) {
          if (++pick[i] < s.candidates[i].size()) break;
          pick[i] = 0;
        }
        if (i == s.members.size()) break;
      }
      if (expired()) {
        result.timed_out = true;
        break;
      }
    }
    partials = prune_minimal(std::move(next), fam.beam_width);
    if (partials.empty() || result.timed_out) break;
  }

  // Full screen is the certificate; the stratified pass only filtered.
  for (const QiMap& qi : partials) {
    if (expired()) {
      result.timed_out = true;
      break;
    }
    QiReport r = check_quasi_interpretation(p, qi);
    if (r.ok) {
      AssignmentSet a;
      a.sup = qi;
      a.weight = qi;
      a.synthesized = true;
      result.found = a;
      return result;
    }
  }

  for (const RuleCheck& rc : best_fail) {
    QiRuleVerdict v;
    v.fsym = rc.fsym;
    v.branch_index = rc.branch_index;
    v.lhs_text = rc.lhs_text;
    v.rhs_text = rc.rhs_text;
    v.verdict = rc.verdict;
    result.failure.rules.push_back(std::move(v));
  }
  result.failure.ok = false;
  return result;
}

AssignmentSet qi_to_supinterpretation(
    const std::map<std::string, MaxPoly>& qi) {
  AssignmentSet a;
  a.sup = qi;
  a.weight = qi;
  a.synthesized = true;
  return a;
}

}  // namespace qfc
