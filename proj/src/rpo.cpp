#include "qfc/rpo.hpp"

#include <algorithm>

#include "qfc/callgraph.hpp"

namespace qfc {

bool RpoPrecedence::equiv(const std::string& a, const std::string& b) const {
  auto ia = class_of.find(a), ib = class_of.find(b);
  return ia != class_of.end() && ib != class_of.end() &&
         ia->second == ib->second;
}

bool RpoPrecedence::strictly_above(const std::string& a,
                                   const std::string& b) const {
  auto ia = class_of.find(a), ib = class_of.find(b);
  return ia != class_of.end() && ib != class_of.end() &&
         above.count({ia->second, ib->second}) > 0;
}

std::vector<RewriteRule> extract_rules(const Program& p) {
  std::vector<RewriteRule> rules;
  for (const Definition& d : p.defs) {
    Expr head;
    head.tag = Expr::Tag::Fct;
    head.sym = d.fsym;
    for (const std::string& x : d.params) {
      Expr v;
      v.tag = Expr::Tag::Var;
      v.sym = x;
      head.args.push_back(v);
    }
    if (d.body.tag != Expr::Tag::Case) {
      rules.push_back({head, d.body});
      continue;
    }
    for (const Branch& b : d.body.branches) {
      // Scrutinees are parameters; substitute their patterns into the head.
      Expr lhs = head;
      for (size_t s = 0; s < d.body.args.size(); ++s) {
        const std::string& scrut = d.body.args[s].sym;
        for (size_t i = 0; i < d.params.size(); ++i)
          if (d.params[i] == scrut) lhs.args[i] = b.patterns[s];
      }
      rules.push_back({lhs, b.body});
    }
  }
  return rules;
}

namespace {

Status status_of(const StatusMap& st, const std::string& f) {
  auto it = st.find(f);
  return it == st.end() ? Status::Product : it->second;
}

bool less(const Expr& s, const Expr& t, const RpoPrecedence& prec,
          const StatusMap& st);

bool leq(const Expr& s, const Expr& t, const RpoPrecedence& prec,
         const StatusMap& st) {
  return expr_equal(s, t) || less(s, t, prec, st);
}

bool seq_product_less(const std::vector<Expr>& ss, const std::vector<Expr>& ts,
                      const RpoPrecedence& prec, const StatusMap& st) {
  if (ss.size() != ts.size()) return false;
  bool some_strict = false;
  for (size_t i = 0; i < ss.size(); ++i) {
    if (!leq(ss[i], ts[i], prec, st)) return false;
    if (less(ss[i], ts[i], prec, st)) some_strict = true;
  }
  return some_strict;
}

bool seq_lex_less(const std::vector<Expr>& ss, const std::vector<Expr>& ts,
                  const RpoPrecedence& prec, const StatusMap& st) {
  size_t n = std::min(ss.size(), ts.size());
  for (size_t j = 0; j < n; ++j) {
    bool prefix_leq = true;
    for (size_t i = 0; i < j; ++i)
      if (!leq(ss[i], ts[i], prec, st)) {
        prefix_leq = false;
        break;
      }
    if (prefix_leq && less(ss[j], ts[j], prec, st)) return true;
  }
  return false;
}

bool less(const Expr& s, const Expr& t, const RpoPrecedence& prec,
          const StatusMap& st) {
  if (t.tag == Expr::Tag::Var) return false;
  // Rule: s below some immediate subterm (or equal to it).
  for (const Expr& ti : t.args)
    if (leq(s, ti, prec, st)) return true;
  if (s.tag == Expr::Tag::Var) return false;

  bool args_below = true;
  for (const Expr& si : s.args)
    if (!less(si, t, prec, st)) {
      args_below = false;
      break;
    }
  if (!args_below) return false;

  // Rule: strictly smaller head, all arguments below the whole of t.
  if (prec.strictly_above(t.sym, s.sym)) return true;
  // Rule: equivalent heads, status-determined argument decrease.
  if (prec.equiv(t.sym, s.sym)) {
    Status status = status_of(st, t.sym);
    return status == Status::Product ? seq_product_less(s.args, t.args, prec, st)
                                     : seq_lex_less(s.args, t.args, prec, st);
  }
  return false;
}

}  // namespace

bool rpo_less(const Expr& s, const Expr& t, const RpoPrecedence& prec,
              const StatusMap& st, bool strict) {
  return strict ? less(s, t, prec, st) : leq(s, t, prec, st);
}

RpoPrecedence auto_precedence(const Program& p) {
  RpoPrecedence out;
  Precedence cg = precedence(p);
  // Function classes keep the call-graph class ids; constructors share one
  // bottom class below everything, builtin operators one class in between.
  int ncls = static_cast<int>(cg.classes.size());
  int op_class = ncls;
  int cns_class = ncls + 1;
  for (const auto& [name, info] : p.symbols.entries) {
    switch (info.kind) {
      case Kind::Fct:
        out.class_of[name] = cg.scc_of.at(name);
        break;
      case Kind::Op:
        out.class_of[name] = op_class;
        break;
      case Kind::Cns:
        out.class_of[name] = cns_class;
        break;
      case Kind::Var:
        break;
    }
  }
  for (int a = 0; a < ncls; ++a) {
    for (int b = 0; b < ncls; ++b)
      if (a != b && cg.reaches[a][b]) out.above.insert({a, b});
    out.above.insert({a, op_class});
    out.above.insert({a, cns_class});
  }
  out.above.insert({op_class, cns_class});
  return out;
}

OrderReport check_program_ordered(const Program& p, const RpoPrecedence& prec,
                                  const StatusMap& st) {
  OrderReport report;
  report.statuses = st;
  report.ordered = true;
  for (const RewriteRule& rule : extract_rules(p)) {
    RuleVerdict rv;
    rv.fsym = rule.lhs.sym;
    rv.rule_text =
        expr_to_string(rule.lhs) + " -> " + expr_to_string(rule.rhs);
    rv.ordered = rpo_less(rule.rhs, rule.lhs, prec, st, true);
    if (!rv.ordered) report.ordered = false;
    report.rules.push_back(std::move(rv));
  }
  return report;
}

OrderReport check_program_ordered(const Program& p) {
  RpoPrecedence prec = auto_precedence(p);
  Precedence cg = precedence(p);
  int ncls = static_cast<int>(cg.classes.size());

  int searchable = std::min(ncls, 16);
  long masks = 1L << searchable;
  OrderReport first;
  bool have_first = false;
  for (long mask = 0; mask < masks; ++mask) {
    StatusMap st;
    for (int c = 0; c < ncls; ++c) {
      Status s = (c < searchable && (mask >> c) & 1) ? Status::Lexicographic
                                                     : Status::Product;
      for (const std::string& f : cg.classes[c]) st[f] = s;
    }
    OrderReport r = check_program_ordered(p, prec, st);
    if (r.ordered) {
      r.status_search_capped = ncls > 16;
      return r;
    }
    if (!have_first) {
      first = std::move(r);
      have_first = true;
    }
  }
  first.status_search_capped = ncls > 16;
  return first;
}

}  // namespace qfc
