#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qfc {

// The vocabulary is split into four disjoint kinds. Variables always have
// arity 0; the other kinds carry the arity they were declared with.
enum class Kind { Var, Cns, Op, Fct };

struct SymbolInfo {
  Kind kind;
  int arity = 0;
};

struct SymbolTable {
  std::map<std::string, SymbolInfo> entries;

  const SymbolInfo* find(const std::string& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool declare(const std::string& name, Kind kind, int arity) {
    auto [it, fresh] = entries.insert({name, SymbolInfo{kind, arity}});
    return fresh;
  }
  bool is(const std::string& name, Kind kind) const {
    const SymbolInfo* s = find(name);
    return s && s->kind == kind;
  }
};

struct Branch;

// One node type covers expressions, patterns (Var/Cns only) and the context
// skeletons used by the fraternity analysis (Hole nodes).
struct Expr {
  enum class Tag { Var, Cns, Op, Fct, Case, Hole };
  Tag tag = Tag::Var;
  std::string sym;            // unused for Case/Hole
  int hole_index = 0;         // Hole only, 1-based
  std::vector<Expr> args;     // application arguments / Case scrutinees
  std::vector<Branch> branches;  // Case only
};

struct Branch {
  std::vector<Expr> patterns;
  Expr body;
};

bool expr_equal(const Expr& a, const Expr& b);
bool is_pattern(const Expr& e);
bool contains_case(const Expr& e);
std::string expr_to_string(const Expr& e);

struct Definition {
  std::string fsym;
  std::vector<std::string> params;
  Expr body;
};

struct Program {
  SymbolTable symbols;
  std::vector<Definition> defs;

  const Definition* find(const std::string& fsym) const {
    for (const Definition& d : defs)
      if (d.fsym == fsym) return &d;
    return nullptr;
  }
};

// Ground constructor term, or the distinguished error element.
struct Value {
  bool err = false;
  std::string cons;
  std::vector<Value> args;

  static Value make_err() {
    Value v;
    v.err = true;
    return v;
  }
};

bool operator==(const Value& a, const Value& b);
bool operator<(const Value& a, const Value& b);
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }

std::string value_to_string(const Value& v);
Expr value_to_expr(const Value& v);

// |e|: 0 for 0-ary symbols and Err, 1 + sum of argument sizes otherwise.
long size_of(const Expr& e);
long size_of(const Value& v);

using Substitution = std::map<std::string, Value>;

// Matches a pattern sequence against a value sequence; values must be
// Err-free. Patterns are linear, so the result is unambiguous.
std::optional<Substitution> match(const std::vector<Expr>& patterns,
                                  const std::vector<Value>& values);

struct Diagnostic {
  std::string def;   // definition name, empty for program-level issues
  std::string rule;  // violated rule identifier
  std::string detail;
};

// Checks the structural invariants: kind/arity agreement, linear patterns,
// non-overlapping branches, no nested Case, bodies either compositional or a
// single top-level Case over the parameter list.
std::vector<Diagnostic> validate_program(const Program& p);

// Helpers shared by the analyses.
std::vector<std::string> pattern_vars(const std::vector<Expr>& patterns);
bool patterns_overlap(const std::vector<Expr>& a, const std::vector<Expr>& b);

}  // namespace qfc
