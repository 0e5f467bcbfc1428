#include "qfc/maxpoly.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qfc {

Rat Poly::constant_term() const { return coeff(Monomial{}); }

Rat Poly::coeff(const Monomial& m) const {
  auto it = terms.find(m);
  return it == terms.end() ? Rat(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = terms.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

Rat Poly::eval(const std::vector<Rat>& x) const {
  Rat acc = 0;
  for (const auto& [m, c] : terms) {
    Rat t = c;
    for (const auto& [v, e] : m) {
      Rat base = v < static_cast<int>(x.size()) ? x[v] : Rat(0);
      for (int k = 0; k < e; ++k) t *= base;
    }
    acc += t;
  }
  return acc;
}

double Poly::eval_double(const std::vector<double>& x) const {
  double acc = 0;
  for (const auto& [m, c] : terms) {
    double t = c.get_d();
    for (const auto& [v, e] : m)
      t *= std::pow(v < static_cast<int>(x.size()) ? x[v] : 0.0, e);
    acc += t;
  }
  return acc;
}

int Poly::max_var() const {
  int mv = -1;
  for (const auto& [m, c] : terms)
    if (!m.empty()) mv = std::max(mv, m.rbegin()->first);
  return mv;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) {
    int t = 0;
    for (const auto& [v, e] : m) t += e;
    d = std::max(d, t);
  }
  return d;
}

std::string Poly::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms) {
    if (!first) os << " + ";
    first = false;
    bool printed = false;
    if (c != 1 || m.empty()) {
      os << c.get_str();
      printed = true;
    }
    for (const auto& [v, e] : m) {
      if (printed) os << "*";
      os << "X" << (v + 1);
      if (e > 1) os << "^" << e;
      printed = true;
    }
  }
  return os.str();
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.terms) r.add_term(m, c);
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      Monomial m = ma;
      for (const auto& [v, e] : mb) m[v] += e;
      r.add_term(m, ca * cb);
    }
  return r;
}

MaxPoly MaxPoly::constant(const Rat& c) {
  MaxPoly f;
  Poly p;
  p.add_term({}, c);
  f.branches.push_back(p);
  return f;
}

MaxPoly MaxPoly::variable(int i) {
  MaxPoly f;
  f.arity = i + 1;
  Poly p;
  p.add_term({{i, 1}}, 1);
  f.branches.push_back(p);
  return f;
}

Rat MaxPoly::eval_at(const std::vector<Rat>& x) const {
  Rat best = 0;
  bool first = true;
  for (const Poly& b : branches) {
    Rat v = b.eval(x);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

double MaxPoly::eval_double(const std::vector<double>& x) const {
  double best = 0;
  bool first = true;
  for (const Poly& b : branches) {
    double v = b.eval_double(x);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

int MaxPoly::degree() const {
  int d = 0;
  for (const Poly& b : branches) d = std::max(d, b.degree());
  return d;
}

std::string MaxPoly::to_string() const {
  if (branches.empty()) return "0";
  if (branches.size() == 1) return branches[0].to_string();
  std::ostringstream os;
  os << "max(";
  for (size_t i = 0; i < branches.size(); ++i) {
    if (i) os << ", ";
    os << branches[i].to_string();
  }
  os << ")";
  return os.str();
}

namespace {

// a coefficient-dominates b: a - b has only nonnegative coefficients.
bool dominates(const Poly& a, const Poly& b) {
  for (const auto& [m, c] : b.terms)
    if (a.coeff(m) < c) return false;
  return true;
}

}  // namespace

bool maxpoly_equal(const MaxPoly& a, const MaxPoly& b) {
  if (a.branches.size() != b.branches.size()) return false;
  for (size_t i = 0; i < a.branches.size(); ++i)
    if (a.branches[i].terms != b.branches[i].terms) return false;
  return true;
}

MaxPoly normalize(MaxPoly f) {
  std::vector<Poly> kept;
  for (Poly& b : f.branches) {
    bool dominated = false;
    for (const Poly& k : kept)
      if (dominates(k, b)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    std::erase_if(kept, [&](const Poly& k) { return dominates(b, k); });
    kept.push_back(std::move(b));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Poly& a, const Poly& b) { return a.terms < b.terms; });
  f.branches = std::move(kept);
  if (f.branches.empty()) f.branches.push_back(Poly{});
  for (const Poly& b : f.branches) f.arity = std::max(f.arity, b.max_var() + 1);
  return f;
}

MaxPoly mp_add(const MaxPoly& a, const MaxPoly& b) {
  MaxPoly r;
  r.arity = std::max(a.arity, b.arity);
  for (const Poly& x : a.branches)
    for (const Poly& y : b.branches) r.branches.push_back(poly_add(x, y));
  return normalize(std::move(r));
}

MaxPoly mp_mul(const MaxPoly& a, const MaxPoly& b) {
  MaxPoly r;
  r.arity = std::max(a.arity, b.arity);
  for (const Poly& x : a.branches)
    for (const Poly& y : b.branches) r.branches.push_back(poly_mul(x, y));
  return normalize(std::move(r));
}

MaxPoly mp_max(const MaxPoly& a, const MaxPoly& b) {
  MaxPoly r;
  r.arity = std::max(a.arity, b.arity);
  r.branches = a.branches;
  r.branches.insert(r.branches.end(), b.branches.begin(), b.branches.end());
  return normalize(std::move(r));
}

MaxPoly mp_max(const std::vector<MaxPoly>& xs) {
  if (xs.empty()) return MaxPoly::constant(0);
  MaxPoly r = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) r = mp_max(r, xs[i]);
  return r;
}

MaxPoly mp_compose(const MaxPoly& f, const std::vector<MaxPoly>& args) {
  // Substitute per branch: a posynomial is monotone on R+, so the max over
  // per-variable branch choices realizes the composed maximum.
  MaxPoly r;
  for (const Poly& fb : f.branches) {
    // Collect variables used by this branch.
    std::vector<int> vars;
    for (const auto& [m, c] : fb.terms)
      for (const auto& [v, e] : m)
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
          vars.push_back(v);
    // Cartesian product over argument branch choices.
    std::vector<size_t> choice(vars.size(), 0);
    while (true) {
      Poly result;
      for (const auto& [m, c] : fb.terms) {
        Poly term;
        term.add_term({}, c);
        for (const auto& [v, e] : m) {
          size_t vi =
              std::find(vars.begin(), vars.end(), v) - vars.begin();
          const Poly& sub =
              v < static_cast<int>(args.size()) && !args[v].branches.empty()
                  ? args[v].branches[choice[vi]]
                  : Poly{};
          for (int k = 0; k < e; ++k) term = poly_mul(term, sub);
        }
        result = poly_add(result, term);
      }
      r.branches.push_back(result);
      // Advance the choice counter.
      size_t i = 0;
      for (; i < vars.size(); ++i) {
        size_t lim = vars[i] < static_cast<int>(args.size())
                         ? args[vars[i]].branches.size()
                         : 1;
        if (++choice[i] < lim) break;
        choice[i] = 0;
      }
      if (i == vars.size()) break;
    }
  }
  return normalize(std::move(r));
}

MaxPoly mp_embed(const MaxPoly& f, int arity) {
  MaxPoly r = f;
  r.arity = std::max(r.arity, arity);
  return r;
}

bool is_monotone(const MaxPoly&) {
  // Normalized MaxPoly has nonnegative coefficients only, hence weakly
  // monotone on (R+)^n.
  return true;
}

namespace {

const double kGridVals[] = {0.0, 0.5, 1.0, 2.0, 10.0, 100.0};
const Rat kGridRats[] = {Rat(0), Rat(1, 2), Rat(1), Rat(2), Rat(10), Rat(100)};
constexpr size_t kGridSize = 6;
constexpr long kGridCap = 100000;
constexpr int kRandomSamples = 10000;

// Violation predicate in exact arithmetic.
bool violates_exact(const MaxPoly& lhs, const MaxPoly& rhs, bool strict,
                    const std::vector<Rat>& x) {
  Rat l = lhs.eval_at(x);
  Rat r = rhs.eval_at(x);
  return strict ? l <= r : l < r;
}

// Runs the sampling refuter; fills witness on success.
std::optional<std::vector<Rat>> find_witness(const MaxPoly& lhs,
                                             const MaxPoly& rhs, bool strict,
                                             int n, std::uint64_t seed) {
  if (n == 0) {
    std::vector<Rat> x;
    if (violates_exact(lhs, rhs, strict, x)) return x;
    return std::nullopt;
  }
  // Grid scan in doubles, exact confirmation of candidates.
  long total = 1;
  for (int i = 0; i < n && total < kGridCap; ++i) total *= kGridSize;
  total = std::min(total, kGridCap);
  std::vector<double> xd(n);
  std::vector<Rat> xr(n);
  const double eps = 1e-9;
  for (long idx = 0; idx < total; ++idx) {
    long t = idx;
    for (int i = 0; i < n; ++i) {
      xd[i] = kGridVals[t % kGridSize];
      xr[i] = kGridRats[t % kGridSize];
      t /= kGridSize;
    }
    double l = lhs.eval_double(xd);
    double r = rhs.eval_double(xd);
    if ((strict && l <= r + eps) || (!strict && l < r + eps))
      if (violates_exact(lhs, rhs, strict, xr)) return xr;
  }
  // Random samples, quarter-integer rationals in [0, 100].
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 400);
  for (int s = 0; s < kRandomSamples; ++s) {
    for (int i = 0; i < n; ++i) {
      int k = dist(rng);
      xr[i] = Rat(k, 4);
      xr[i].canonicalize();
      xd[i] = k / 4.0;
    }
    double l = lhs.eval_double(xd);
    double r = rhs.eval_double(xd);
    if ((strict && l <= r + eps) || (!strict && l < r + eps))
      if (violates_exact(lhs, rhs, strict, xr)) return xr;
  }
  return std::nullopt;
}

}  // namespace

Verdict compare_geq(const MaxPoly& lhs, const MaxPoly& rhs, bool strict,
                    bool dominance_only, std::uint64_t seed) {
  int n = std::max(lhs.arity, rhs.arity);
  // Dominance: every rhs branch is coefficient-dominated by some lhs branch;
  // strict additionally needs a positive constant gap in that branch pair.
  bool dom = true;
  for (const Poly& r : rhs.branches) {
    bool found = false;
    for (const Poly& l : lhs.branches)
      if (dominates(l, r) &&
          (!strict || l.constant_term() > r.constant_term())) {
        found = true;
        break;
      }
    if (!found) {
      dom = false;
      break;
    }
  }
  if (dom)
    return {VerdictKind::Valid, {},
            strict ? "dominance with positive constant gap" : "dominance"};
  if (!dominance_only) {
    if (auto w = find_witness(lhs, rhs, strict, n, seed))
      return {VerdictKind::Refuted, *w, "sampled witness"};
  }
  return {VerdictKind::Unknown, {}, dominance_only ? "dominance failed" : ""};
}

Verdict has_subterm_property(const MaxPoly& f, std::uint64_t seed) {
  bool all = true;
  for (int i = 0; i < f.arity; ++i) {
    Monomial xi{{i, 1}};
    bool found = false;
    for (const Poly& b : f.branches)
      if (b.coeff(xi) >= 1) {
        found = true;
        break;
      }
    if (!found) {
      all = false;
      break;
    }
  }
  if (all) return {VerdictKind::Valid, {}, "projection coefficient >= 1"};
  for (int i = 0; i < f.arity; ++i) {
    MaxPoly proj = mp_embed(MaxPoly::variable(i), f.arity);
    Verdict v = compare_geq(f, proj, false, false, seed);
    if (v.refuted()) return v;
  }
  return {VerdictKind::Unknown, {}, ""};
}

bool is_additive_constructor(const MaxPoly& f) {
  return additive_constant(f).has_value();
}

std::optional<Rat> additive_constant(const MaxPoly& f) {
  if (f.branches.size() != 1) return std::nullopt;
  const Poly& b = f.branches[0];
  Rat alpha = 0;
  std::vector<bool> seen(f.arity, false);
  for (const auto& [m, c] : b.terms) {
    if (m.empty()) {
      alpha = c;
      continue;
    }
    if (m.size() != 1 || m.begin()->second != 1 || c != 1) return std::nullopt;
    int v = m.begin()->first;
    if (v >= f.arity) return std::nullopt;
    seen[v] = true;
  }
  for (int i = 0; i < f.arity; ++i)
    if (!seen[i]) return std::nullopt;
  if (f.arity > 0 && alpha < 1) return std::nullopt;
  if (alpha < 0) return std::nullopt;
  return alpha;
}

std::string verdict_to_string(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Valid:
      return "Valid";
    case VerdictKind::Unknown:
      return "Unknown";
    case VerdictKind::Refuted: {
      std::ostringstream os;
      os << "Refuted at (";
      for (size_t i = 0; i < v.witness.size(); ++i) {
        if (i) os << ", ";
        os << v.witness[i].get_str();
      }
      os << ")";
      return os.str();
    }
  }
  return "?";
}

MaxPoly normalize(const MpExpr& e, int arity) {
  MaxPoly r;
  switch (e.tag) {
    case MpExpr::Tag::Const:
      r = MaxPoly::constant(e.value);
      break;
    case MpExpr::Tag::Var:
      r = MaxPoly::variable(e.var);
      break;
    case MpExpr::Tag::Add: {
      r = MaxPoly::constant(0);
      for (const MpExpr& a : e.args) r = mp_add(r, normalize(a, arity));
      break;
    }
    case MpExpr::Tag::Mul: {
      r = MaxPoly::constant(1);
      for (const MpExpr& a : e.args) r = mp_mul(r, normalize(a, arity));
      break;
    }
    case MpExpr::Tag::Max: {
      std::vector<MaxPoly> parts;
      for (const MpExpr& a : e.args) parts.push_back(normalize(a, arity));
      r = mp_max(parts);
      break;
    }
  }
  return mp_embed(r, arity);
}

Rat mpexpr_eval(const MpExpr& e, const std::vector<Rat>& x) {
  switch (e.tag) {
    case MpExpr::Tag::Const:
      return e.value;
    case MpExpr::Tag::Var:
      return e.var < static_cast<int>(x.size()) ? x[e.var] : Rat(0);
    case MpExpr::Tag::Add: {
      Rat acc = 0;
      for (const MpExpr& a : e.args) acc += mpexpr_eval(a, x);
      return acc;
    }
    case MpExpr::Tag::Mul: {
      Rat acc = 1;
      for (const MpExpr& a : e.args) acc *= mpexpr_eval(a, x);
      return acc;
    }
    case MpExpr::Tag::Max: {
      Rat best = 0;
      bool first = true;
      for (const MpExpr& a : e.args) {
        Rat v = mpexpr_eval(a, x);
        if (first || v > best) best = v;
        first = false;
      }
      return best;
    }
  }
  return 0;
}

}  // namespace qfc
