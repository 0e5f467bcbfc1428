#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qfc {

using Rat = mpq_class;

// Monomial over variables X1..Xn: variable index (0-based) -> exponent.
using Monomial = std::map<int, int>;

// Polynomial with nonnegative rational coefficients.
struct Poly {
  std::map<Monomial, Rat> terms;

  bool is_zero() const { return terms.empty(); }
  Rat constant_term() const;
  Rat coeff(const Monomial& m) const;
  void add_term(const Monomial& m, const Rat& c);
  Rat eval(const std::vector<Rat>& x) const;
  double eval_double(const std::vector<double>& x) const;
  int max_var() const;  // largest variable index used, -1 if constant
  int degree() const;
  std::string to_string() const;
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);

// Max of posynomials over (R+)^arity. Normal form: branches deduplicated and
// coefficient-dominated branches pruned (sound on R+ since every coefficient
// is nonnegative).
struct MaxPoly {
  int arity = 0;
  std::vector<Poly> branches;

  static MaxPoly constant(const Rat& c);
  static MaxPoly variable(int i);

  Rat eval_at(const std::vector<Rat>& x) const;
  double eval_double(const std::vector<double>& x) const;
  int degree() const;
  bool is_single_branch() const { return branches.size() == 1; }
  std::string to_string() const;
};

bool maxpoly_equal(const MaxPoly& a, const MaxPoly& b);

MaxPoly mp_add(const MaxPoly& a, const MaxPoly& b);
MaxPoly mp_mul(const MaxPoly& a, const MaxPoly& b);
MaxPoly mp_max(const MaxPoly& a, const MaxPoly& b);
MaxPoly mp_max(const std::vector<MaxPoly>& xs);

// f(args[0], ..., args[n-1]); the result ranges over the argument variables.
MaxPoly mp_compose(const MaxPoly& f, const std::vector<MaxPoly>& args);

// Raises arity without renaming variables.
MaxPoly mp_embed(const MaxPoly& f, int arity);

MaxPoly normalize(MaxPoly f);

enum class VerdictKind { Valid, Refuted, Unknown };

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::vector<Rat> witness;  // violating point when Refuted
  std::string note;

  bool valid() const { return kind == VerdictKind::Valid; }
  bool refuted() const { return kind == VerdictKind::Refuted; }
};

std::string verdict_to_string(const Verdict& v);

// Sound three-valued check of forall X in (R+)^n: lhs(X) >= rhs(X)
// (> when strict). Valid comes from coefficient dominance only; Refuted from
// a grid-plus-random sampling refuter whose witness is confirmed in exact
// arithmetic. dominance_only skips the refuter (fast path for synthesis,
// where not-Valid is already a rejection).
Verdict compare_geq(const MaxPoly& lhs, const MaxPoly& rhs, bool strict,
                    bool dominance_only = false, std::uint64_t seed = 1);

// Weak monotonicity holds for every normalized MaxPoly; kept as the named
// predicate of the assignment contracts.
bool is_monotone(const MaxPoly& f);

// forall i, X: f(X) >= X_i.
Verdict has_subterm_property(const MaxPoly& f, std::uint64_t seed = 1);

// Exactly one branch of the form sum X_i + alpha with unit coefficients;
// alpha >= 1 for positive arity, alpha >= 0 for 0-ary symbols.
bool is_additive_constructor(const MaxPoly& f);

// Additive constant alpha when is_additive_constructor holds.
std::optional<Rat> additive_constant(const MaxPoly& f);

// ----- expression-level syntax, shared with the annotation parser -----

struct MpExpr {
  enum class Tag { Const, Var, Add, Mul, Max };
  Tag tag = Tag::Const;
  Rat value;        // Const
  int var = 0;      // Var (0-based)
  std::vector<MpExpr> args;
};

MaxPoly normalize(const MpExpr& e, int arity);
Rat mpexpr_eval(const MpExpr& e, const std::vector<Rat>& x);

}  // namespace qfc
