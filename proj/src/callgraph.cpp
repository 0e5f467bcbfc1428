#include "qfc/callgraph.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace qfc {

namespace {

void collect_subexpressions(const Expr& e, std::vector<const Expr*>& out) {
  out.push_back(&e);
  for (const Expr& a : e.args) collect_subexpressions(a, out);
}

}  // namespace

void collect_function_symbols(const Expr& e, std::vector<std::string>& out) {
  if (e.tag == Expr::Tag::Fct) out.push_back(e.sym);
  for (const Expr& a : e.args) collect_function_symbols(a, out);
  for (const Branch& b : e.branches) collect_function_symbols(b.body, out);
}

std::vector<ActivationSite> activation_sites(const Program& p) {
  std::vector<ActivationSite> sites;
  for (const Definition& d : p.defs) {
    auto add_branch = [&](const std::vector<Expr>& pats, const Expr& body,
                          int branch) {
      std::vector<const Expr*> subs;
      collect_subexpressions(body, subs);
      for (const Expr* s : subs)
        sites.push_back({d.fsym, pats, *s, branch});
    };
    if (d.body.tag == Expr::Tag::Case) {
      for (size_t j = 0; j < d.body.branches.size(); ++j)
        add_branch(d.body.branches[j].patterns, d.body.branches[j].body,
                   static_cast<int>(j));
    } else {
      std::vector<Expr> pats;
      for (const std::string& x : d.params) {
        Expr v;
        v.tag = Expr::Tag::Var;
        v.sym = x;
        pats.push_back(v);
      }
      add_branch(pats, d.body, -1);
    }
  }
  return sites;
}

bool Precedence::geq(const std::string& f, const std::string& g) const {
  auto fi = scc_of.find(f);
  auto gi = scc_of.find(g);
  if (fi == scc_of.end() || gi == scc_of.end()) return false;
  return reaches[fi->second][gi->second];
}

bool Precedence::equiv(const std::string& f, const std::string& g) const {
  auto fi = scc_of.find(f);
  auto gi = scc_of.find(g);
  if (fi == scc_of.end() || gi == scc_of.end()) return false;
  return fi->second == gi->second;
}

bool Precedence::gt(const std::string& f, const std::string& g) const {
  return geq(f, g) && !equiv(f, g);
}

std::vector<int> Precedence::bottom_up() const {
  // reaches is transitive; order by number of reachable SCCs ascending.
  std::vector<int> order(classes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    long ca = std::count(reaches[a].begin(), reaches[a].end(), true);
    long cb = std::count(reaches[b].begin(), reaches[b].end(), true);
    return ca < cb;
  });
  return order;
}

Precedence precedence(const Program& p) {
  std::vector<std::string> fcts;
  for (const auto& [name, info] : p.symbols.entries)
    if (info.kind == Kind::Fct) fcts.push_back(name);
  std::map<std::string, int> idx;
  for (size_t i = 0; i < fcts.size(); ++i) idx[fcts[i]] = static_cast<int>(i);

  size_t n = fcts.size();
  std::vector<std::set<int>> adj(n);
  for (const ActivationSite& s : activation_sites(p)) {
    if (s.expr.tag != Expr::Tag::Fct) continue;
    auto it = idx.find(s.expr.sym);
    if (it != idx.end()) adj[idx[s.fsym]].insert(it->second);
  }

  // Tarjan SCC.
  std::vector<int> low(n, -1), num(n, -1), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0, ncomp = 0;
  std::function<void(int)> dfs = [&](int v) {
    num[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (num[w] == -1) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], num[w]);
      }
    }
    if (low[v] == num[v]) {
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (size_t v = 0; v < n; ++v)
    if (num[v] == -1) dfs(static_cast<int>(v));

  Precedence prec;
  prec.classes.resize(ncomp);
  for (size_t v = 0; v < n; ++v) {
    prec.scc_of[fcts[v]] = comp[v];
    prec.classes[comp[v]].push_back(fcts[v]);
  }
  // Reachability between SCCs (reflexive-transitive closure).
  prec.reaches.assign(ncomp, std::vector<bool>(ncomp, false));
  for (int c = 0; c < ncomp; ++c) prec.reaches[c][c] = true;
  for (size_t v = 0; v < n; ++v)
    for (int w : adj[v])
      if (comp[v] != comp[w]) prec.reaches[comp[v]][comp[w]] = true;
  for (int k = 0; k < ncomp; ++k)
    for (int i = 0; i < ncomp; ++i)
      if (prec.reaches[i][k])
        for (int j = 0; j < ncomp; ++j)
          if (prec.reaches[k][j]) prec.reaches[i][j] = true;
  return prec;
}

namespace {

// Splits a branch body into context + equivalent calls: the outermost
// subterms headed by a symbol in the activator's SCC become holes.
void split_context(const Expr& e, const std::string& fsym,
                   const Precedence& prec, Expr& skeleton,
                   std::vector<Expr>& calls) {
  if (e.tag == Expr::Tag::Fct && prec.equiv(fsym, e.sym)) {
    calls.push_back(e);
    skeleton.tag = Expr::Tag::Hole;
    skeleton.sym.clear();
    skeleton.args.clear();
    skeleton.hole_index = static_cast<int>(calls.size());
    return;
  }
  skeleton = e;
  for (size_t i = 0; i < e.args.size(); ++i)
    split_context(e.args[i], fsym, prec, skeleton.args[i], calls);
}

}  // namespace

std::vector<Fraternity> fraternities(const Program& p) {
  return fraternities(p, precedence(p));
}

std::vector<Fraternity> fraternities(const Program& p,
                                     const Precedence& prec) {
  std::vector<Fraternity> out;
  for (const Definition& d : p.defs) {
    auto add = [&](const std::vector<Expr>& pats, const Expr& body,
                   int branch) {
      std::vector<std::string> syms;
      collect_function_symbols(body, syms);
      bool has_equiv = std::any_of(syms.begin(), syms.end(),
                                   [&](const std::string& g) {
                                     return prec.equiv(d.fsym, g);
                                   });
      if (!has_equiv) return;
      // The branch body is the unique maximal activated expression; cutting
      // at the outermost equivalent calls leaves a context whose function
      // symbols are all strictly below the activator.
      Fraternity fr;
      fr.fsym = d.fsym;
      fr.patterns = pats;
      fr.branch_index = branch;
      fr.context = body;
      split_context(body, d.fsym, prec, fr.context, fr.calls);
      out.push_back(std::move(fr));
    };
    if (d.body.tag == Expr::Tag::Case) {
      for (size_t j = 0; j < d.body.branches.size(); ++j)
        add(d.body.branches[j].patterns, d.body.branches[j].body,
            static_cast<int>(j));
    } else {
      std::vector<Expr> pats;
      for (const std::string& x : d.params) {
        Expr v;
        v.tag = Expr::Tag::Var;
        v.sym = x;
        pats.push_back(v);
      }
      add(pats, d.body, -1);
    }
  }
  return out;
}

std::vector<Diagnostic> detect_nested_fraternities(const Program& p) {
  std::vector<Diagnostic> diags;
  Precedence prec = precedence(p);
  for (const Fraternity& fr : fraternities(p, prec)) {
    for (const Expr& call : fr.calls) {
      std::vector<std::string> inner;
      for (const Expr& a : call.args) collect_function_symbols(a, inner);
      for (const std::string& g : inner) {
        if (prec.equiv(fr.fsym, g)) {
          diags.push_back({fr.fsym, "nested-fraternity",
                           "call " + expr_to_string(call) +
                               " nests the equivalent symbol " + g});
          break;
        }
      }
    }
  }
  return diags;
}

}  // namespace qfc
