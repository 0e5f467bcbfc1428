#include "qfc/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace qfc {

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.tag != b.tag || a.sym != b.sym || a.hole_index != b.hole_index)
    return false;
  if (a.args.size() != b.args.size() || a.branches.size() != b.branches.size())
    return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(a.args[i], b.args[i])) return false;
  for (size_t i = 0; i < a.branches.size(); ++i) {
    const Branch& ba = a.branches[i];
    const Branch& bb = b.branches[i];
    if (ba.patterns.size() != bb.patterns.size()) return false;
    for (size_t j = 0; j < ba.patterns.size(); ++j)
      if (!expr_equal(ba.patterns[j], bb.patterns[j])) return false;
    if (!expr_equal(ba.body, bb.body)) return false;
  }
  return true;
}

bool is_pattern(const Expr& e) {
  if (e.tag == Expr::Tag::Var) return true;
  if (e.tag != Expr::Tag::Cns) return false;
  return std::all_of(e.args.begin(), e.args.end(), is_pattern);
}

bool contains_case(const Expr& e) {
  if (e.tag == Expr::Tag::Case) return true;
  for (const Expr& a : e.args)
    if (contains_case(a)) return true;
  return false;
}

std::string expr_to_string(const Expr& e) {
  std::ostringstream os;
  switch (e.tag) {
    case Expr::Tag::Var:
      os << e.sym;
      break;
    case Expr::Tag::Hole:
      os << "<" << e.hole_index << ">";
      break;
    case Expr::Tag::Cns:
    case Expr::Tag::Op:
    case Expr::Tag::Fct:
      os << e.sym;
      if (!e.args.empty()) {
        os << "(";
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) os << ",";
          os << expr_to_string(e.args[i]);
        }
        os << ")";
      }
      break;
    case Expr::Tag::Case: {
      os << "case ";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ",";
        os << expr_to_string(e.args[i]);
      }
      os << " of ";
      for (size_t i = 0; i < e.branches.size(); ++i) {
        if (i) os << " | ";
        const Branch& b = e.branches[i];
        for (size_t j = 0; j < b.patterns.size(); ++j) {
          if (j) os << ",";
          os << expr_to_string(b.patterns[j]);
        }
        os << " -> " << expr_to_string(b.body);
      }
      break;
    }
  }
  return os.str();
}

bool operator==(const Value& a, const Value& b) {
  if (a.err != b.err || a.cons != b.cons || a.args.size() != b.args.size())
    return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!(a.args[i] == b.args[i])) return false;
  return true;
}

namespace {

// Three-way comparison; lexicographical_compare's two-call probe per
// element is exponential on deep values.
int cmp_value(const Value& a, const Value& b) {
  if (a.err != b.err) return a.err ? 1 : -1;
  if (int c = a.cons.compare(b.cons)) return c < 0 ? -1 : 1;
  size_t n = std::min(a.args.size(), b.args.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = cmp_value(a.args[i], b.args[i])) return c;
  if (a.args.size() != b.args.size())
    return a.args.size() < b.args.size() ? -1 : 1;
  return 0;
}

}  // namespace

bool operator<(const Value& a, const Value& b) {
  return cmp_value(a, b) < 0;
}

std::string value_to_string(const Value& v) {
  if (v.err) return "Err";
  std::ostringstream os;
  os << v.cons;
  if (!v.args.empty()) {
    os << "(";
    for (size_t i = 0; i < v.args.size(); ++i) {
      if (i) os << ",";
      os << value_to_string(v.args[i]);
    }
    os << ")";
  }
  return os.str();
}

Expr value_to_expr(const Value& v) {
  Expr e;
  e.tag = Expr::Tag::Cns;
  e.sym = v.cons;
  for (const Value& a : v.args) e.args.push_back(value_to_expr(a));
  return e;
}

long size_of(const Expr& e) {
  if (e.tag == Expr::Tag::Case) {
    // Size is only used on application/pattern shapes; a Case node counts
    // like its largest component so the function stays total.
    long m = 0;
    for (const Expr& a : e.args) m = std::max(m, size_of(a));
    for (const Branch& b : e.branches) m = std::max(m, size_of(b.body));
    return m;
  }
  if (e.args.empty()) return 0;
  long s = 1;
  for (const Expr& a : e.args) s += size_of(a);
  return s;
}

long size_of(const Value& v) {
  if (v.err || v.args.empty()) return 0;
  long s = 1;
  for (const Value& a : v.args) s += size_of(a);
  return s;
}

namespace {

bool match_one(const Expr& p, const Value& v, Substitution& out) {
  if (p.tag == Expr::Tag::Var) {
    out.emplace(p.sym, v);
    return true;
  }
  if (v.err || p.sym != v.cons || p.args.size() != v.args.size()) return false;
  for (size_t i = 0; i < p.args.size(); ++i)
    if (!match_one(p.args[i], v.args[i], out)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match(const std::vector<Expr>& patterns,
                                  const std::vector<Value>& values) {
  if (patterns.size() != values.size()) return std::nullopt;
  Substitution sigma;
  for (size_t i = 0; i < patterns.size(); ++i)
    if (!match_one(patterns[i], values[i], sigma)) return std::nullopt;
  return sigma;
}

std::vector<std::string> pattern_vars(const std::vector<Expr>& patterns) {
  std::vector<std::string> vars;
  std::set<std::string> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& p) {
    if (p.tag == Expr::Tag::Var) {
      if (seen.insert(p.sym).second) vars.push_back(p.sym);
      return;
    }
    for (const Expr& a : p.args) walk(a);
  };
  for (const Expr& p : patterns) walk(p);
  return vars;
}

namespace {

// Syntactic unifiability of two linear patterns with disjoint variables.
bool unifiable(const Expr& a, const Expr& b) {
  if (a.tag == Expr::Tag::Var || b.tag == Expr::Tag::Var) return true;
  if (a.sym != b.sym || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!unifiable(a.args[i], b.args[i])) return false;
  return true;
}

void collect_var_occurrences(const Expr& p, std::vector<std::string>& out) {
  if (p.tag == Expr::Tag::Var) {
    out.push_back(p.sym);
    return;
  }
  for (const Expr& a : p.args) collect_var_occurrences(a, out);
}

}  // namespace

bool patterns_overlap(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!unifiable(a[i], b[i])) return false;
  return true;
}

namespace {

struct Validator {
  const Program& p;
  std::vector<Diagnostic> diags;

  void report(const std::string& def, const std::string& rule,
              const std::string& detail) {
    diags.push_back({def, rule, detail});
  }

  void check_kinds_arity(const std::string& def, const Expr& e,
                         const std::set<std::string>& bound) {
    switch (e.tag) {
      case Expr::Tag::Var:
        if (!bound.count(e.sym))
          report(def, "unbound-variable", "variable " + e.sym);
        return;
      case Expr::Tag::Cns:
      case Expr::Tag::Op:
      case Expr::Tag::Fct: {
        const SymbolInfo* s = p.symbols.find(e.sym);
        Kind want = e.tag == Expr::Tag::Cns   ? Kind::Cns
                    : e.tag == Expr::Tag::Op ? Kind::Op
                                             : Kind::Fct;
        if (!s || s->kind != want)
          report(def, "kind-mismatch", "symbol " + e.sym);
        else if (static_cast<size_t>(s->arity) != e.args.size())
          report(def, "arity-mismatch",
                 e.sym + " applied to " + std::to_string(e.args.size()) +
                     " arguments, declared arity " + std::to_string(s->arity));
        for (const Expr& a : e.args) check_kinds_arity(def, a, bound);
        return;
      }
      case Expr::Tag::Case: {
        for (const Expr& s : e.args) check_kinds_arity(def, s, bound);
        for (const Branch& b : e.branches) {
          if (b.patterns.size() != e.args.size())
            report(def, "pattern-sequence-length",
                   "branch pattern count differs from scrutinee count");
          std::vector<std::string> occ;
          for (const Expr& pat : b.patterns) {
            collect_var_occurrences(pat, occ);
            check_pattern(def, pat);
          }
          std::set<std::string> uniq(occ.begin(), occ.end());
          if (uniq.size() != occ.size())
            report(def, "non-linear-pattern",
                   "repeated variable in branch pattern sequence");
          std::set<std::string> inner = bound;
          inner.insert(uniq.begin(), uniq.end());
          check_kinds_arity(def, b.body, inner);
        }
        return;
      }
      case Expr::Tag::Hole:
        report(def, "hole-in-program", "hole marker outside analysis");
        return;
    }
  }

  void check_pattern(const std::string& def, const Expr& pat) {
    if (pat.tag == Expr::Tag::Var) return;
    if (pat.tag != Expr::Tag::Cns) {
      report(def, "pattern-not-constructor", expr_to_string(pat));
      return;
    }
    const SymbolInfo* s = p.symbols.find(pat.sym);
    if (!s || s->kind != Kind::Cns)
      report(def, "pattern-not-constructor", pat.sym);
    else if (static_cast<size_t>(s->arity) != pat.args.size())
      report(def, "arity-mismatch", "pattern " + pat.sym);
    for (const Expr& a : pat.args) check_pattern(def, a);
  }

  void run() {
    std::set<std::string> defined;
    for (const Definition& d : defs()) {
      if (!defined.insert(d.fsym).second)
        report(d.fsym, "duplicate-definition", d.fsym);
      const SymbolInfo* s = p.symbols.find(d.fsym);
      if (!s || s->kind != Kind::Fct)
        report(d.fsym, "kind-mismatch", "definition head is not Fct");
      else if (static_cast<size_t>(s->arity) != d.params.size())
        report(d.fsym, "arity-mismatch", "definition parameter count");

      std::set<std::string> params(d.params.begin(), d.params.end());
      if (params.size() != d.params.size())
        report(d.fsym, "duplicate-parameter", d.fsym);

      if (d.body.tag == Expr::Tag::Case) {
        // Analysis-friendly shape: scrutinees are exactly the parameters
        // in declaration order.
        bool direct = d.body.args.size() == d.params.size();
        if (direct)
          for (size_t i = 0; i < d.params.size(); ++i)
            direct = direct && d.body.args[i].tag == Expr::Tag::Var &&
                     d.body.args[i].sym == d.params[i];
        if (!direct)
          report(d.fsym, "case-scrutinee-shape",
                 "top-level Case must scrutinize the parameters in order");
        for (const Branch& b : d.body.branches) {
          if (contains_case(b.body))
            report(d.fsym, "nested-case", "Case inside a branch body");
        }
        for (const Expr& s : d.body.args)
          if (contains_case(s))
            report(d.fsym, "nested-case", "Case inside a scrutinee");
        // Pairwise non-overlap (unifiability or subsumption).
        const auto& brs = d.body.branches;
        for (size_t i = 0; i < brs.size(); ++i)
          for (size_t j = i + 1; j < brs.size(); ++j)
            if (patterns_overlap(brs[i].patterns, brs[j].patterns))
              report(d.fsym, "overlapping-patterns",
                     "branches " + std::to_string(i + 1) + " and " +
                         std::to_string(j + 1));
      } else if (contains_case(d.body)) {
        report(d.fsym, "nested-case",
               "Case below the root of a definition body");
      }
      check_kinds_arity(d.fsym, d.body, params);
    }
  }

  const std::vector<Definition>& defs() { return p.defs; }
};

}  // namespace

std::vector<Diagnostic> validate_program(const Program& p) {
  Validator v{p, {}};
  v.run();
  return v.diags;
}

}  // namespace qfc
