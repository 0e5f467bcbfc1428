// Python bindings over the analyzer core. Programs and annotation files
// pass as source text; reports come back as plain dicts so callers don't
// need wrapper classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qfc/assign.hpp"
#include "qfc/callgraph.hpp"
#include "qfc/criterion.hpp"
#include "qfc/eval.hpp"
#include "qfc/parser.hpp"
#include "qfc/rpo.hpp"
#include "qfc/synth.hpp"

namespace py = pybind11;
using namespace qfc;

namespace {

Program parse_checked(const std::string& text) {
  Program p = parse_program(text);
  std::vector<Diagnostic> diags = validate_program(p);
  if (!diags.empty()) {
    std::string msg = "invalid program:";
    for (const Diagnostic& d : diags)
      msg += "\n  [" + d.rule + "] " + d.def + ": " + d.detail;
    throw std::invalid_argument(msg);
  }
  return p;
}

AssignmentSet assignment_of(const Program& p, const std::string& ann_text) {
  AnnotationFile ann = parse_annotations(ann_text, p);
  AssignmentSet a;
  a.sup = ann.sup;
  a.weight = ann.weight;
  return a;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["kind"] = verdict_to_string(v);
  if (v.refuted()) {
    py::list w;
    for (const Rat& r : v.witness) w.append(r.get_d());
    d["witness"] = w;
  }
  return d;
}

py::dict criterion_dict(const CriterionReport& cr) {
  py::dict d;
  d["status"] = criterion_status_to_string(cr.status);
  py::list frs;
  for (const FraternityVerdict& fv : cr.fraternities) {
    py::dict f;
    f["activator"] = fv.fsym;
    f["branch"] = fv.branch_index;
    f["lhs"] = fv.lhs_text;
    f["cond1"] = verdict_dict(fv.cond1);
    f["cond1_rhs"] = fv.cond1_rhs_text;
    f["cond2"] = verdict_dict(fv.cond2);
    f["cond2_rhs"] = fv.cond2_rhs_text;
    frs.append(f);
  }
  d["fraternities"] = frs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qfc, m) {
  m.doc() = "static analyzer for first-order functional programs";

  m.def(
      "eval_program",
      [](const std::string& text, const std::string& expr_text,
         long max_steps, bool memo) {
        Program p = parse_checked(text);
        Expr e = parse_expression(expr_text, p);
        EvalBudget budget;
        if (max_steps > 0) budget.max_steps = max_steps;
        py::dict out;
        if (memo) {
          Cache cache;
          CacheStats stats;
          EvalResult r = eval_memo(p, e, cache, stats, budget);
          out["timeout"] = r.timeout;
          if (!r.timeout) out["value"] = value_to_string(r.value);
          out["cache_entries"] = stats.entries();
          out["cache_hits"] = stats.hits;
        } else {
          EvalResult r = eval(p, e, budget);
          out["timeout"] = r.timeout;
          if (!r.timeout) out["value"] = value_to_string(r.value);
        }
        return out;
      },
      py::arg("program"), py::arg("expr"), py::arg("max_steps") = 0,
      py::arg("memo") = false);

  m.def(
      "analyze",
      [](const std::string& text) {
        Program p = parse_checked(text);
        Precedence prec = precedence(p);
        py::dict out;
        py::list classes;
        for (int cls : prec.bottom_up()) {
          py::list c;
          for (const std::string& f : prec.classes[cls]) c.append(f);
          classes.append(c);
        }
        out["precedence_classes"] = classes;
        py::list frs;
        for (const Fraternity& fr : fraternities(p, prec)) {
          py::dict f;
          f["activator"] = fr.fsym;
          f["context"] = expr_to_string(fr.context);
          py::list calls;
          for (const Expr& c : fr.calls) calls.append(expr_to_string(c));
          f["hole_calls"] = calls;
          frs.append(f);
        }
        out["fraternities"] = frs;
        py::list nested;
        for (const Diagnostic& d : detect_nested_fraternities(p))
          nested.append(d.detail);
        out["nested"] = nested;
        return out;
      },
      py::arg("program"));

  m.def(
      "check",
      [](const std::string& text, const std::string& ann_text,
         bool search) {
        Program p = parse_checked(text);
        AssignmentSet a = assignment_of(p, ann_text);
        if (search && a.weight.empty()) {
          WeightSearchResult ws = search_weights(p, a.sup);
          py::dict out = criterion_dict(ws.best_report);
          out["searched"] = ws.found.has_value();
          if (ws.found) {
            py::dict weights;
            for (const auto& [f, w] : ws.found->weight)
              weights[py::str(f)] = w.to_string();
            out["weights"] = weights;
          }
          return out;
        }
        return criterion_dict(check_quasi_friendly(p, a));
      },
      py::arg("program"), py::arg("annotations"),
      py::arg("search_weights") = false);

  m.def(
      "rpo",
      [](const std::string& text) {
        Program p = parse_checked(text);
        OrderReport r = check_program_ordered(p);
        py::dict out;
        out["ordered"] = r.ordered;
        py::list rules;
        for (const RuleVerdict& rv : r.rules) {
          py::dict j;
          j["rule"] = rv.rule_text;
          j["ordered"] = rv.ordered;
          rules.append(j);
        }
        out["rules"] = rules;
        py::dict statuses;
        for (const auto& [f, s] : r.statuses)
          statuses[py::str(f)] =
              s == Status::Product ? "product" : "lex";
        out["statuses"] = statuses;
        return out;
      },
      py::arg("program"));

  m.def(
      "synthesize",
      [](const std::string& text, int max_degree, long timeout_ms) {
        Program p = parse_checked(text);
        TemplateFamily fam;
        fam.max_degree = max_degree;
        SynthResult r =
            synthesize_qi(p, fam, std::chrono::milliseconds(timeout_ms));
        py::dict out;
        out["found"] = r.found.has_value();
        out["timed_out"] = r.timed_out;
        if (r.found) {
          py::dict qi;
          for (const auto& [sym, f] : r.found->sup)
            qi[py::str(sym)] = f.to_string();
          out["assignment"] = qi;
        }
        return out;
      },
      py::arg("program"), py::arg("max_degree") = 2,
      py::arg("timeout_ms") = 60000);

  m.def(
      "bounds",
      [](const std::string& text, const std::string& fsym, long grid) {
        Program p = parse_checked(text);
        InputGrid g;
        g.grid = grid;
        BoundsReport r = validate_bounds(p, fsym, g);
        py::dict out;
        out["super_polynomial"] = r.super_polynomial;
        out["output_covered"] = r.output_envelope.covered;
        if (r.output_envelope.covered) {
          out["output_degree"] = r.output_envelope.degree;
          out["output_coefficient"] = r.output_envelope.coefficient;
        }
        out["observations"] = r.rows.size();
        return out;
      },
      py::arg("program"), py::arg("fsym"), py::arg("grid") = 20);
}
