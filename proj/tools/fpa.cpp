// fpa: analyzer and interpreter for first-order functional programs.
//
// Subcommands: eval, analyze, check, rpo, synth, bounds. Reports print as
// text by default; --json emits one deterministic document on stdout.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfc/assign.hpp"
#include "qfc/callgraph.hpp"
#include "qfc/criterion.hpp"
#include "qfc/eval.hpp"
#include "qfc/parser.hpp"
#include "qfc/rpo.hpp"
#include "qfc/synth.hpp"

using json = nlohmann::ordered_json;
using namespace qfc;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes shared by all subcommands.
constexpr int kOk = 0;
constexpr int kParseError = 1;
constexpr int kTimeout = 2;
constexpr int kNegative = 3;
constexpr int kUnknown = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string digest(const std::string& text) {
  // FNV-1a, enough to tie a report to its input.
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

json report_head(const std::string& command, const std::string& text) {
  json r;
  r["tool"] = "fpa";
  r["version"] = kVersion;
  r["command"] = command;
  r["digest"] = digest(text);
  return r;
}

struct Loaded {
  Program program;
  std::string text;
};

Loaded load_program(const std::string& path) {
  Loaded l;
  l.text = slurp(path);
  l.program = parse_program(l.text);
  std::vector<Diagnostic> diags = validate_program(l.program);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "invalid program:";
    for (const Diagnostic& d : diags)
      os << "\n  [" << d.rule << "] " << d.def << ": " << d.detail;
    throw std::runtime_error(os.str());
  }
  return l;
}

json verdict_json(const Verdict& v) {
  json j;
  j["kind"] = verdict_to_string(v);
  if (v.refuted()) {
    json w = json::array();
    for (const Rat& r : v.witness) w.push_back(r.get_d());
    j["witness"] = w;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

AssignmentSet assignment_from(const AnnotationFile& ann) {
  AssignmentSet a;
  a.sup = ann.sup;
  a.weight = ann.weight;
  return a;
}

int cmd_eval(const std::string& file, const std::string& expr_text, bool memo,
             bool trace, long max_steps, bool as_json) {
  Loaded l = load_program(file);
  Expr e = parse_expression(expr_text, l.program);
  EvalBudget budget;
  if (max_steps > 0) budget.max_steps = max_steps;

  json r = report_head("eval", l.text);
  r["expr"] = expr_text;
  EvalResult res;
  CacheStats stats;
  if (memo) {
    Cache cache;
    res = eval_memo(l.program, e, cache, stats, budget);
  } else {
    res = eval(l.program, e, budget);
  }
  r["timeout"] = res.timeout;
  if (!res.timeout) r["value"] = value_to_string(res.value);
  if (memo) {
    r["cache"] = {{"entries", stats.entries()}, {"hits", stats.hits}};
  }
  if (trace && e.tag == Expr::Tag::Fct) {
    std::vector<Value> args;
    bool ground = true;
    for (const Expr& a : e.args) {
      EvalResult ar = eval(l.program, a, budget);
      if (ar.timeout) {
        ground = false;
        break;
      }
      args.push_back(ar.value);
    }
    if (ground) {
      CallTree tree = trace_call_tree(l.program, {e.sym, args}, budget);
      json edges = json::array();
      for (const auto& [from, to] : tree.edges) {
        std::ostringstream a, b;
        a << from.fsym << "(";
        for (size_t i = 0; i < from.args.size(); ++i)
          a << (i ? "," : "") << value_to_string(from.args[i]);
        a << ")";
        b << to.fsym << "(";
        for (size_t i = 0; i < to.args.size(); ++i)
          b << (i ? "," : "") << value_to_string(to.args[i]);
        b << ")";
        edges.push_back({a.str(), b.str()});
      }
      r["call_tree"] = {{"states", tree.states.size()},
                        {"truncated", tree.truncated},
                        {"edges", edges}};
    }
  }

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else if (res.timeout) {
    std::cout << "Timeout\n";
  } else {
    std::cout << value_to_string(res.value) << "\n";
    if (memo)
      std::cout << "cache entries: " << stats.entries()
                << ", hits: " << stats.hits << "\n";
    if (r.contains("call_tree"))
      std::cout << "call tree: " << r["call_tree"]["states"] << " states\n";
  }
  return res.timeout ? kTimeout : kOk;
}

int cmd_analyze(const std::string& file, bool as_json) {
  Loaded l = load_program(file);
  Precedence prec = precedence(l.program);
  std::vector<Fraternity> frs = fraternities(l.program, prec);
  std::vector<Diagnostic> nested = detect_nested_fraternities(l.program);

  json r = report_head("analyze", l.text);
  json classes = json::array();
  for (int cls : prec.bottom_up()) {
    json c = json::array();
    for (const std::string& f : prec.classes[cls]) c.push_back(f);
    classes.push_back(c);
  }
  r["precedence_classes"] = classes;
  json fr_json = json::array();
  for (const Fraternity& fr : frs) {
    json f;
    f["activator"] = fr.fsym;
    std::ostringstream pats;
    for (size_t i = 0; i < fr.patterns.size(); ++i)
      pats << (i ? "," : "") << expr_to_string(fr.patterns[i]);
    f["patterns"] = pats.str();
    f["context"] = expr_to_string(fr.context);
    json calls = json::array();
    for (const Expr& c : fr.calls) calls.push_back(expr_to_string(c));
    f["hole_calls"] = calls;
    fr_json.push_back(f);
  }
  r["fraternities"] = fr_json;
  json nj = json::array();
  for (const Diagnostic& d : nested)
    nj.push_back({{"def", d.def}, {"detail", d.detail}});
  r["nested"] = nj;

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << "precedence (bottom-up):\n";
    for (const auto& c : classes) {
      std::cout << " ";
      for (const auto& f : c) std::cout << " " << f.get<std::string>();
      std::cout << "\n";
    }
    std::cout << "fraternities: " << frs.size() << "\n";
    for (const auto& f : fr_json)
      std::cout << "  " << f["activator"].get<std::string>() << "("
                << f["patterns"].get<std::string>()
                << ") context " << f["context"].get<std::string>() << "\n";
    for (const Diagnostic& d : nested)
      std::cout << "nested fraternity: " << d.def << ": " << d.detail << "\n";
  }
  return kOk;
}

int cmd_check(const std::string& file, const std::string& ann_file,
              bool search, long probe_size, bool as_json) {
  Loaded l = load_program(file);
  AssignmentSet a;
  if (!ann_file.empty()) {
    AnnotationFile ann = parse_annotations(slurp(ann_file), l.program);
    a = assignment_from(ann);
  }

  json r = report_head("check", l.text);
  SupReport sup = check_sup_conditions(l.program, a, probe_size);
  json probes = json::array();
  for (const ConditionProbe& pr : sup.probes) {
    json p;
    p["symbol"] = pr.symbol;
    p["condition"] = pr.condition;
    p["status"] = pr.status;
    if (!pr.detail.empty()) p["detail"] = pr.detail;
    probes.push_back(p);
  }
  r["sup_probes"] = probes;
  r["sup_ok"] = sup.ok;

  CriterionReport cr;
  if (search && a.weight.empty()) {
    WeightSearchResult ws = search_weights(l.program, a.sup);
    if (ws.found) {
      a = *ws.found;
      json weights;
      for (const auto& [f, w] : a.weight) weights[f] = w.to_string();
      r["searched_weights"] = weights;
    } else {
      r["searched_weights"] = nullptr;
    }
    cr = ws.best_report;
  } else {
    cr = check_quasi_friendly(l.program, a);
  }
  r["status"] = criterion_status_to_string(cr.status);
  json frs = json::array();
  for (const FraternityVerdict& fv : cr.fraternities) {
    json f;
    f["activator"] = fv.fsym;
    f["branch"] = fv.branch_index;
    f["lhs"] = fv.lhs_text;
    f["cond1_rhs"] = fv.cond1_rhs_text;
    f["cond1"] = verdict_json(fv.cond1);
    f["cond2_rhs"] = fv.cond2_rhs_text;
    f["cond2"] = verdict_json(fv.cond2);
    frs.push_back(f);
  }
  r["fraternities"] = frs;
  if (!cr.missing.empty()) r["missing"] = cr.missing;

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << "status: " << criterion_status_to_string(cr.status) << "\n";
    for (const FraternityVerdict& fv : cr.fraternities) {
      std::cout << "  " << fv.fsym << " branch " << fv.branch_index
                << ": cond1 " << verdict_to_string(fv.cond1) << ", cond2 "
                << verdict_to_string(fv.cond2) << "\n";
      std::cout << "    lhs  " << fv.lhs_text << "\n";
      std::cout << "    rhs1 " << fv.cond1_rhs_text << "\n";
      std::cout << "    rhs2 " << fv.cond2_rhs_text << "\n";
    }
    if (!sup.ok) std::cout << "sup-interpretation probes failed\n";
  }
  switch (cr.status) {
    case CriterionStatus::QuasiFriendly:
      return kOk;
    case CriterionStatus::NotQuasiFriendly:
    case CriterionStatus::RejectedNested:
      return kNegative;
    case CriterionStatus::Unknown:
      return kUnknown;
  }
  return kUnknown;
}

int cmd_rpo(const std::string& file, const std::string& ann_file,
            bool as_json) {
  Loaded l = load_program(file);
  OrderReport report;
  if (!ann_file.empty()) {
    AnnotationFile ann = parse_annotations(slurp(ann_file), l.program);
    // Explicit precedence groups: later groups sit below earlier ones.
    RpoPrecedence prec = auto_precedence(l.program);
    if (!ann.prec.empty()) {
      prec.class_of.clear();
      prec.above.clear();
      int next_class = 0;
      std::vector<int> group_class;
      for (const auto& group : ann.prec) {
        int cls = next_class++;
        group_class.push_back(cls);
        for (const std::string& f : group) prec.class_of[f] = cls;
      }
      int cns_class = next_class++;
      for (const auto& [name, info] : l.program.symbols.entries)
        if (!prec.class_of.count(name) && info.kind != Kind::Var)
          prec.class_of[name] = cns_class;
      for (size_t i = 0; i < group_class.size(); ++i) {
        for (size_t j = i + 1; j < group_class.size(); ++j)
          prec.above.insert({group_class[i], group_class[j]});
        prec.above.insert({group_class[i], cns_class});
      }
    }
    StatusMap st;
    for (const auto& [f, s] : ann.status)
      st[f] = s == "lex" ? Status::Lexicographic : Status::Product;
    report = check_program_ordered(l.program, prec, st);
  } else {
    report = check_program_ordered(l.program);
  }

  json r = report_head("rpo", l.text);
  r["ordered"] = report.ordered;
  json statuses;
  for (const auto& [f, s] : report.statuses)
    statuses[f] = s == Status::Product ? "product" : "lex";
  r["statuses"] = statuses;
  json rules = json::array();
  for (const RuleVerdict& rv : report.rules)
    rules.push_back({{"rule", rv.rule_text}, {"ordered", rv.ordered}});
  r["rules"] = rules;
  r["status_search_capped"] = report.status_search_capped;

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << (report.ordered ? "ordered" : "not ordered") << "\n";
    for (const RuleVerdict& rv : report.rules)
      std::cout << "  " << (rv.ordered ? "ok " : "FAIL ") << rv.rule_text
                << "\n";
  }
  return report.ordered ? kOk : kNegative;
}

int cmd_synth(const std::string& file, int max_degree, int beam,
              long timeout_ms, const std::string& out_ann, bool as_json) {
  Loaded l = load_program(file);
  TemplateFamily fam;
  fam.max_degree = max_degree;
  fam.beam_width = beam;
  SynthResult res = synthesize_qi(l.program, fam,
                                  std::chrono::milliseconds(timeout_ms));

  json r = report_head("synth", l.text);
  r["found"] = res.found.has_value();
  r["timed_out"] = res.timed_out;
  r["candidates_screened"] = res.candidates_screened;
  if (res.found) {
    json qi;
    for (const auto& [sym, f] : res.found->sup) qi[sym] = f.to_string();
    r["assignment"] = qi;
  } else {
    json fails = json::array();
    for (const QiRuleVerdict& v : res.failure.rules)
      fails.push_back({{"fsym", v.fsym},
                       {"branch", v.branch_index},
                       {"lhs", v.lhs_text},
                       {"rhs", v.rhs_text},
                       {"verdict", verdict_json(v.verdict)}});
    r["failures"] = fails;
  }

  if (res.found && !out_ann.empty()) {
    AnnotationFile ann;
    ann.sup = res.found->sup;
    ann.weight = res.found->weight;
    std::ofstream out(out_ann);
    out << annotations_to_string(ann, l.program);
  }

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else if (res.found) {
    std::cout << "found quasi-interpretation:\n";
    for (const auto& [sym, f] : res.found->sup)
      std::cout << "  " << sym << " = " << f.to_string() << "\n";
  } else {
    std::cout << (res.timed_out ? "timeout\n" : "no quasi-interpretation in family\n");
  }
  if (res.found) return kOk;
  return res.timed_out ? kUnknown : kNegative;
}

int cmd_bounds(const std::string& file, const std::string& fsym, long grid,
               long max_tuples, unsigned seed, long max_steps, bool as_json) {
  Loaded l = load_program(file);
  if (!l.program.find(fsym))
    throw std::runtime_error("no definition for " + fsym);
  InputGrid g;
  g.grid = grid;
  g.max_tuples = max_tuples;
  g.seed = seed;
  EvalBudget budget;
  if (max_steps > 0) budget.max_steps = max_steps;
  BoundsReport rep = validate_bounds(l.program, fsym, g, budget);

  json r = report_head("bounds", l.text);
  r["fsym"] = fsym;
  auto env = [](const EnvelopeFit& e) {
    json j;
    j["covered"] = e.covered;
    if (e.covered) {
      j["degree"] = e.degree;
      j["coefficient"] = e.coefficient;
    }
    return j;
  };
  r["output_envelope"] = env(rep.output_envelope);
  r["state_envelope"] = env(rep.state_envelope);
  r["cache_envelope"] = env(rep.cache_envelope);
  r["super_polynomial"] = rep.super_polynomial;
  json rows = json::array();
  for (const BoundObservation& row : rep.rows) {
    json j;
    j["inputs"] = row.input_sizes;
    j["output"] = row.output_size;
    j["max_state_arg"] = row.max_state_arg;
    j["cache_entries"] = row.cache_entries;
    if (row.timeout) j["timeout"] = true;
    rows.push_back(j);
  }
  r["observations"] = rows;

  if (as_json) {
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << fsym << ": ";
    if (rep.output_envelope.covered)
      std::cout << "output <= " << rep.output_envelope.coefficient << " * X^"
                << rep.output_envelope.degree << "\n";
    else
      std::cout << "super-polynomial output growth\n";
    if (rep.state_envelope.covered)
      std::cout << "call-tree args <= " << rep.state_envelope.coefficient
                << " * X^" << rep.state_envelope.degree << "\n";
    std::cout << rep.rows.size() << " observations\n";
  }
  return rep.super_polynomial ? kNegative : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyzer and interpreter for first-order functional programs"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "structured report on stdout");

  std::string file, expr_text, ann_file, fsym, out_ann;
  bool memo = false, trace = false, search = false;
  long max_steps = 0, probe_size = 10;
  int max_degree = 2, beam = 24;
  long timeout_ms = 60000;
  long grid = 20, max_tuples = 900;
  unsigned seed = 7;

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate an expression");
  c_eval->add_option("file", file)->required();
  c_eval->add_option("expr", expr_text)->required();
  c_eval->add_flag("--memo", memo);
  c_eval->add_flag("--trace", trace);
  c_eval->add_option("--max-steps", max_steps);

  CLI::App* c_analyze = app.add_subcommand("analyze", "program structure");
  c_analyze->add_option("file", file)->required();

  CLI::App* c_check = app.add_subcommand("check", "quasi-friendly check");
  c_check->add_option("file", file)->required();
  c_check->add_option("ann", ann_file);
  c_check->add_flag("--search-weights", search);
  c_check->add_option("--probe-size", probe_size);

  CLI::App* c_rpo = app.add_subcommand("rpo", "path-ordering check");
  c_rpo->add_option("file", file)->required();
  c_rpo->add_option("ann", ann_file);

  CLI::App* c_synth = app.add_subcommand("synth", "quasi-interpretation synthesis");
  c_synth->add_option("file", file)->required();
  c_synth->add_option("--max-degree", max_degree);
  c_synth->add_option("--beam", beam);
  c_synth->add_option("--timeout-ms", timeout_ms);
  c_synth->add_option("-o,--out", out_ann);

  CLI::App* c_bounds = app.add_subcommand("bounds", "empirical size bounds");
  c_bounds->add_option("file", file)->required();
  c_bounds->add_option("fsym", fsym)->required();
  c_bounds->add_option("--grid", grid);
  c_bounds->add_option("--max-tuples", max_tuples);
  c_bounds->add_option("--seed", seed);
  c_bounds->add_option("--max-steps", max_steps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_eval->parsed())
      return cmd_eval(file, expr_text, memo, trace, max_steps, as_json);
    if (c_analyze->parsed()) return cmd_analyze(file, as_json);
    if (c_check->parsed())
      return cmd_check(file, ann_file, search, probe_size, as_json);
    if (c_rpo->parsed()) return cmd_rpo(file, ann_file, as_json);
    if (c_synth->parsed())
      return cmd_synth(file, max_degree, beam, timeout_ms, out_ann, as_json);
    if (c_bounds->parsed())
      return cmd_bounds(file, fsym, grid, max_tuples, seed, max_steps,
                        as_json);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kParseError;
}
