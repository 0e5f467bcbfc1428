#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qfc/syntax.hpp"

namespace qfc {

enum class Status { Product, Lexicographic };

// Quasi-order over Fct and Cns: equivalence classes plus a strict order
// between classes (transitively closed on construction).
struct RpoPrecedence {
  std::map<std::string, int> class_of;
  std::set<std::pair<int, int>> above;  // (a, b): class a strictly above b

  bool equiv(const std::string& a, const std::string& b) const;
  bool strictly_above(const std::string& a, const std::string& b) const;
};

using StatusMap = std::map<std::string, Status>;

struct RewriteRule {
  Expr lhs;  // f(p1, ..., pn)
  Expr rhs;  // branch body
};

// One rule per Case branch; compositional definitions get f(x) -> body.
std::vector<RewriteRule> extract_rules(const Program& p);

// Standard RPO orientation: the head of the strictly smaller term sits
// strictly below (or in the same class with a status decrease). Variables
// compare by equality only.
bool rpo_less(const Expr& s, const Expr& t, const RpoPrecedence& prec,
              const StatusMap& st, bool strict = true);

// Function-symbol precedence derived from the activation call graph, with
// every constructor in one shared bottom class.
RpoPrecedence auto_precedence(const Program& p);

struct RuleVerdict {
  std::string fsym;
  std::string rule_text;
  bool ordered;
};

struct OrderReport {
  bool ordered = false;
  StatusMap statuses;  // witness statuses when ordered
  std::vector<RuleVerdict> rules;
  bool status_search_capped = false;
};

// Explicit precedence and statuses: check every rule strictly.
OrderReport check_program_ordered(const Program& p, const RpoPrecedence& prec,
                                  const StatusMap& st);

// Auto mode: derived precedence, status assignments searched per
// equivalence class (all-product first, at most 2^16 assignments).
OrderReport check_program_ordered(const Program& p);

}  // namespace qfc
