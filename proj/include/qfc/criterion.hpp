#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfc/assign.hpp"
#include "qfc/callgraph.hpp"
#include "qfc/eval.hpp"
#include "qfc/maxpoly.hpp"
#include "qfc/syntax.hpp"

namespace qfc {

struct FraternityVerdict {
  std::string fsym;
  int branch_index;
  std::string lhs_text;
  std::string cond1_rhs_text;
  std::string cond2_rhs_text;
  Verdict cond1;
  Verdict cond2;
};

enum class CriterionStatus {
  QuasiFriendly,
  NotQuasiFriendly,
  Unknown,
  RejectedNested,
};

struct CriterionReport {
  CriterionStatus status = CriterionStatus::Unknown;
  std::vector<FraternityVerdict> fraternities;
  std::vector<Diagnostic> nested;
  std::vector<std::string> missing;  // sup/weight entries named explicitly
};

std::string criterion_status_to_string(CriterionStatus s);

// The two quasi-friendly inequalities per fraternity, both non-strict:
//   1. omega_f(theta*(p))  >=  max_i omega_gi(theta*(e_i))
//   2. omega_f(theta*(p))  >=  theta*(C)[omega_g1(...), ..., omega_gr(...)]
CriterionReport check_quasi_friendly(const Program& p, const AssignmentSet& a,
                                     bool dominance_only = false);

struct WeightFamily {
  std::vector<Rat> coefficients = {Rat(0), Rat(1, 2), Rat(1), Rat(2), Rat(3)};
  std::vector<Rat> constants = {Rat(0), Rat(1), Rat(2), Rat(3)};
  int max_degree = 2;
};

struct WeightSearchResult {
  std::optional<AssignmentSet> found;
  CriterionReport best_report;  // final report (found) or best partial
};

// Enumerates weight candidates per equivalence class and returns the first
// assignment under which the program is quasi-friendly.
WeightSearchResult search_weights(const Program& p,
                                  const std::map<std::string, MaxPoly>& sup,
                                  const WeightFamily& family = {});

// Weight template enumeration shared with the QI synthesis.
std::vector<MaxPoly> weight_templates(int arity, const WeightFamily& family,
                                      bool require_subterm);

struct DerivedBound {
  std::string fsym;
  MaxPoly bound;  // one variable X = max input size
  std::string stratum;  // "non-recursive" | "recursive-empirical"
};

// Constructive bound for symbols whose class has no fraternity, by the
// bottom-up composition P_e(X) = P_h(max_i P_ei(X)), P_c(X) = nX + 1.
std::optional<DerivedBound> derive_bound_nonrecursive(const Program& p,
                                                      const std::string& f);

struct BoundObservation {
  std::vector<long> input_sizes;
  long max_input = 0;
  long output_size = 0;      // ||f(v)||, 0 for Err/timeout
  long max_state_arg = 0;    // largest call-tree state argument size
  long cache_entries = 0;
  bool timeout = false;
};

struct EnvelopeFit {
  bool covered = false;
  int degree = 0;
  double coefficient = 0;
};

struct BoundsReport {
  std::string fsym;
  std::vector<BoundObservation> rows;
  EnvelopeFit output_envelope;     // output size vs input size
  EnvelopeFit state_envelope;      // call-tree argument size vs input size
  EnvelopeFit cache_envelope;      // memo table growth vs input size
  bool super_polynomial = false;    // no degree <= 4 cover for outputs
};

struct InputGrid {
  long grid = 20;          // numeral grid limit / target size for terms
  long max_tuples = 900;
  unsigned seed = 7;
};

// Runs f over generated inputs, recording output sizes, call-tree state
// sizes and memoization cache growth, then fits the smallest monomial
// envelope c * X^d with d <= max_degree on a split train/check basis.
BoundsReport validate_bounds(const Program& p, const std::string& fsym,
                             const InputGrid& grid, EvalBudget budget = {},
                             int max_degree = 4);

// Envelope fitting over (x, y) observations: coefficient from the lower
// half of the x-range must cover the upper half.
EnvelopeFit fit_envelope(const std::vector<std::pair<long, long>>& obs,
                         int max_degree);

}  // namespace qfc
