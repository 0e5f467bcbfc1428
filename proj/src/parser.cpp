#include "qfc/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace qfc {

namespace {

struct Token {
  enum class Type { Ident, Number, Punct, End };
  Type type = Type::End;
  std::string text;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : src_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at(const std::string& punct_or_kw) const {
    return tok_.type != Token::Type::End && tok_.text == punct_or_kw;
  }
  Token expect(const std::string& text, const std::string& what) {
    if (!at(text))
      throw ParseError("expected '" + text + "' (" + what + ")", tok_.line,
                       tok_.col);
    return take();
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{Token::Type::End, "", line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    tok_.line = line_;
    tok_.col = col_;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        consume();
      tok_.type = Token::Type::Ident;
      tok_.text = src_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.'))
        consume();
      tok_.type = Token::Type::Number;
      tok_.text = src_.substr(start, pos_ - start);
    } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      consume();
      consume();
      tok_.type = Token::Type::Punct;
      tok_.text = "->";
    } else {
      consume();
      tok_.type = Token::Type::Punct;
      tok_.text = std::string(1, c);
    }
  }

  void consume() {
    ++pos_;
    ++col_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

bool is_keyword(const std::string& s) {
  return s == "case" || s == "of" || s == "cons" || s == "op";
}

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& text) : lex_(text) {}

  Program parse() {
    // First pass over declarations happens inline; function symbols are
    // pre-scanned so forward calls resolve.
    prescan_functions();
    while (lex_.peek().type != Token::Type::End) {
      if (lex_.at("cons") || lex_.at("op")) {
        parse_declaration();
      } else {
        parse_definition();
      }
    }
    return std::move(prog_);
  }

  Expr parse_single_expression() {
    Expr e = parse_expr({});
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw ParseError("trailing input after expression", t.line, t.col);
    return e;
  }

  Program prog_;

 private:
  void prescan_functions() {}

  void parse_declaration() {
    Token kw = lex_.take();
    Kind kind = kw.text == "cons" ? Kind::Cns : Kind::Op;
    Token name = symbolish("symbol name");
    lex_.expect("/", "declaration arity");
    Token ar = lex_.take();
    if (ar.type != Token::Type::Number)
      throw ParseError("expected arity", ar.line, ar.col);
    int arity = std::stoi(ar.text);
    if (!prog_.symbols.declare(name.text, kind, arity))
      throw ParseError("symbol '" + name.text + "' declared twice", name.line,
                       name.col);
    if (kind == Kind::Op) {
      // eq's result vocabulary.
      prog_.symbols.entries.emplace("True", SymbolInfo{Kind::Cns, 0});
      prog_.symbols.entries.emplace("False", SymbolInfo{Kind::Cns, 0});
    }
  }

  Token ident(const std::string& what) {
    const Token& t = lex_.peek();
    if (t.type != Token::Type::Ident || is_keyword(t.text))
      throw ParseError("expected identifier (" + what + ")", t.line, t.col);
    return lex_.take();
  }

  // Symbol position: identifiers, or integer literals used as constructor
  // names (the numeral 0).
  Token symbolish(const std::string& what) {
    const Token& t = lex_.peek();
    bool ok = (t.type == Token::Type::Ident && !is_keyword(t.text)) ||
              (t.type == Token::Type::Number &&
               t.text.find('.') == std::string::npos);
    if (!ok)
      throw ParseError("expected symbol (" + what + ")", t.line, t.col);
    return lex_.take();
  }

  void parse_definition() {
    Token name = ident("function name");
    lex_.expect("(", "definition head");
    std::vector<std::string> params;
    if (!lex_.at(")")) {
      while (true) {
        params.push_back(ident("parameter").text);
        if (lex_.at(",")) {
          lex_.take();
          continue;
        }
        break;
      }
    }
    lex_.expect(")", "definition head");
    lex_.expect("=", "definition");
    const SymbolInfo* existing = prog_.symbols.find(name.text);
    if (existing && existing->kind != Kind::Fct)
      throw ParseError("'" + name.text + "' is not a function symbol",
                       name.line, name.col);
    prog_.symbols.entries.emplace(
        name.text, SymbolInfo{Kind::Fct, static_cast<int>(params.size())});
    Definition d;
    d.fsym = name.text;
    d.params = params;
    std::set<std::string> scope(params.begin(), params.end());
    d.body = parse_expr(scope);
    prog_.defs.push_back(std::move(d));
  }

  Expr parse_expr(const std::set<std::string>& scope) {
    const Token& t = lex_.peek();
    if (t.text == "case") return parse_case(scope);
    return parse_application(scope);
  }

  Expr parse_case(const std::set<std::string>& scope) {
    lex_.expect("case", "case expression");
    Expr e;
    e.tag = Expr::Tag::Case;
    while (true) {
      e.args.push_back(parse_application(scope));
      if (lex_.at(",")) {
        lex_.take();
        continue;
      }
      break;
    }
    lex_.expect("of", "case expression");
    while (true) {
      Branch b;
      while (true) {
        b.patterns.push_back(parse_pattern());
        if (lex_.at(",")) {
          lex_.take();
          continue;
        }
        break;
      }
      lex_.expect("->", "case branch");
      std::set<std::string> inner = scope;
      for (const std::string& v : pattern_vars(b.patterns)) inner.insert(v);
      b.body = parse_application(inner);
      e.branches.push_back(std::move(b));
      if (lex_.at("|")) {
        lex_.take();
        continue;
      }
      break;
    }
    return e;
  }

  Expr parse_pattern() {
    Token name = symbolish("pattern");
    if (name.type == Token::Type::Number &&
        !prog_.symbols.is(name.text, Kind::Cns))
      throw ParseError("undeclared constructor '" + name.text + "'",
                       name.line, name.col);
    Expr e;
    const SymbolInfo* s = prog_.symbols.find(name.text);
    if (s && s->kind == Kind::Cns) {
      e.tag = Expr::Tag::Cns;
      e.sym = name.text;
      if (lex_.at("(")) {
        lex_.take();
        if (!lex_.at(")")) {
          while (true) {
            e.args.push_back(parse_pattern());
            if (lex_.at(",")) {
              lex_.take();
              continue;
            }
            break;
          }
        }
        lex_.expect(")", "pattern arguments");
      }
      if (static_cast<size_t>(s->arity) != e.args.size())
        throw ParseError("constructor '" + name.text + "' expects " +
                             std::to_string(s->arity) + " arguments",
                         name.line, name.col);
      return e;
    }
    if (s)
      throw ParseError("'" + name.text + "' cannot appear in a pattern",
                       name.line, name.col);
    e.tag = Expr::Tag::Var;
    e.sym = name.text;
    return e;
  }

  Expr parse_application(const std::set<std::string>& scope) {
    Token name = symbolish("expression");
    Expr e;
    const SymbolInfo* s = prog_.symbols.find(name.text);
    bool applied = lex_.at("(");
    if (applied) {
      lex_.take();
      if (!lex_.at(")")) {
        while (true) {
          e.args.push_back(parse_application(scope));
          if (lex_.at(",")) {
            lex_.take();
            continue;
          }
          break;
        }
      }
      lex_.expect(")", "arguments");
    }
    if (s) {
      switch (s->kind) {
        case Kind::Cns:
          e.tag = Expr::Tag::Cns;
          break;
        case Kind::Op:
          e.tag = Expr::Tag::Op;
          break;
        case Kind::Fct:
          e.tag = Expr::Tag::Fct;
          break;
        case Kind::Var:
          throw ParseError("cannot apply a variable", name.line, name.col);
      }
      e.sym = name.text;
      if (static_cast<size_t>(s->arity) != e.args.size())
        throw ParseError("'" + name.text + "' expects " +
                             std::to_string(s->arity) + " arguments",
                         name.line, name.col);
      return e;
    }
    if (applied)
      throw ParseError("undeclared symbol '" + name.text + "' applied",
                       name.line, name.col);
    if (!scope.count(name.text))
      throw ParseError("unbound identifier '" + name.text + "'", name.line,
                       name.col);
    e.tag = Expr::Tag::Var;
    e.sym = name.text;
    return e;
  }

  Lexer lex_;
};

}  // namespace

Program parse_program(const std::string& text) {
  // Pre-scan for definition heads ("name(x,...) =") so calls to functions
  // defined later in the file resolve during the real parse.
  Lexer scan(text);
  std::vector<Token> toks;
  while (scan.peek().type != Token::Type::End) toks.push_back(scan.take());
  SymbolTable heads;
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].type != Token::Type::Ident || is_keyword(toks[i].text))
      continue;
    if (i > 0 && (toks[i - 1].text == "cons" || toks[i - 1].text == "op"))
      continue;
    if (toks[i + 1].text != "(") continue;
    int depth = 0, commas = 0;
    bool empty = true;
    size_t j = i + 1;
    for (; j < toks.size(); ++j) {
      if (toks[j].text == "(") {
        ++depth;
      } else if (toks[j].text == ")") {
        if (--depth == 0) break;
      } else if (depth == 1) {
        empty = false;
        if (toks[j].text == ",") ++commas;
      }
    }
    if (j + 1 < toks.size() && toks[j + 1].text == "=")
      heads.entries.emplace(toks[i].text,
                            SymbolInfo{Kind::Fct, empty ? 0 : commas + 1});
  }
  ProgramParser parser(text);
  parser.prog_.symbols = heads;
  return parser.parse();
}

Expr parse_expression(const std::string& text, const Program& p) {
  ProgramParser parser(text);
  parser.prog_.symbols = p.symbols;
  return parser.parse_single_expression();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& [name, info] : p.symbols.entries) {
    if (info.kind == Kind::Cns)
      os << "cons " << name << "/" << info.arity << "\n";
    else if (info.kind == Kind::Op)
      os << "op " << name << "/" << info.arity << "\n";
  }
  for (const Definition& d : p.defs) {
    os << d.fsym << "(";
    for (size_t i = 0; i < d.params.size(); ++i) {
      if (i) os << ",";
      os << d.params[i];
    }
    os << ") = " << expr_to_string(d.body) << "\n";
  }
  return os.str();
}

// ----- annotations -----

namespace {

class MpExprParser {
 public:
  MpExprParser(Lexer& lex, int arity) : lex_(lex), arity_(arity) {}

  MpExpr parse() { return parse_sum(); }

 private:
  MpExpr parse_sum() {
    MpExpr e = parse_product();
    while (lex_.at("+")) {
      lex_.take();
      MpExpr rhs = parse_product();
      MpExpr sum;
      sum.tag = MpExpr::Tag::Add;
      sum.args = {std::move(e), std::move(rhs)};
      e = std::move(sum);
    }
    return e;
  }

  MpExpr parse_product() {
    MpExpr e = parse_atom();
    while (lex_.at("*")) {
      lex_.take();
      MpExpr rhs = parse_atom();
      MpExpr prod;
      prod.tag = MpExpr::Tag::Mul;
      prod.args = {std::move(e), std::move(rhs)};
      e = std::move(prod);
    }
    return e;
  }

  MpExpr parse_atom() {
    Token t = lex_.take();
    if (t.type == Token::Type::Number) {
      MpExpr e;
      e.tag = MpExpr::Tag::Const;
      e.value = parse_literal(t);
      if (lex_.at("/")) {
        lex_.take();
        Token d = lex_.take();
        if (d.type != Token::Type::Number)
          throw ParseError("expected denominator", d.line, d.col);
        Rat den = parse_literal(d);
        if (den == 0) throw ParseError("zero denominator", d.line, d.col);
        e.value /= den;
      }
      return e;
    }
    if (t.text == "(") {
      MpExpr e = parse_sum();
      lex_.expect(")", "parenthesized expression");
      return e;
    }
    if (t.text == "max") {
      lex_.expect("(", "max");
      MpExpr e;
      e.tag = MpExpr::Tag::Max;
      while (true) {
        e.args.push_back(parse_sum());
        if (lex_.at(",")) {
          lex_.take();
          continue;
        }
        break;
      }
      lex_.expect(")", "max");
      return e;
    }
    if (t.type == Token::Type::Ident && t.text.size() > 1 &&
        t.text[0] == 'X') {
      int idx = 0;
      for (size_t i = 1; i < t.text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t.text[i])))
          throw ParseError("bad parameter variable '" + t.text + "'", t.line,
                           t.col);
        idx = idx * 10 + (t.text[i] - '0');
      }
      if (idx < 1 || idx > arity_)
        throw ParseError("parameter " + t.text + " out of range (arity " +
                             std::to_string(arity_) + ")",
                         t.line, t.col);
      MpExpr e;
      e.tag = MpExpr::Tag::Var;
      e.var = idx - 1;
      return e;
    }
    throw ParseError("unexpected token '" + t.text + "' in expression",
                     t.line, t.col);
  }

  static Rat parse_literal(const Token& t) {
    // Decimal literals are read exactly: 0.5 -> 1/2.
    auto dot = t.text.find('.');
    if (dot == std::string::npos) {
      Rat r(t.text);
      r.canonicalize();  // fraction literals like 2/4 arrive uncanonical
      return r;
    }
    std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
    size_t frac = t.text.size() - dot - 1;
    if (digits.empty() || frac == 0)
      throw ParseError("bad numeric literal '" + t.text + "'", t.line, t.col);
    Rat num(digits);
    Rat den = 1;
    for (size_t i = 0; i < frac; ++i) den *= 10;
    Rat r = num / den;
    r.canonicalize();
    return r;
  }

  Lexer& lex_;
  int arity_;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

}  // namespace

AnnotationFile parse_annotations(const std::string& text, const Program& p) {
  AnnotationFile out;
  std::vector<std::string> lines = split_lines(text);
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& raw = lines[ln];
    std::string line = raw.substr(0, raw.find('#'));
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    int lineno = static_cast<int>(ln + 1);
    Lexer lex(line);
    Token head = lex.take();
    if (head.text == "sup" || head.text == "weight") {
      Token name = lex.take();
      if (name.type != Token::Type::Ident && name.type != Token::Type::Number)
        throw ParseError("expected symbol name", lineno, name.col);
      const SymbolInfo* s = p.symbols.find(name.text);
      if (!s)
        throw ParseError("unknown symbol '" + name.text + "'", lineno,
                         name.col);
      if (head.text == "weight" && s->kind != Kind::Fct)
        throw ParseError("weight entries are for function symbols", lineno,
                         name.col);
      int declared = 0;
      if (lex.at("(")) {
        lex.take();
        if (!lex.at(")")) {
          while (true) {
            lex.take();
            ++declared;
            if (lex.at(",")) {
              lex.take();
              continue;
            }
            break;
          }
        }
        lex.expect(")", "annotation parameters");
      }
      if (declared != 0 && declared != s->arity)
        throw ParseError("arity mismatch for '" + name.text + "'", lineno, 1);
      lex.expect("=", "annotation entry");
      MpExprParser ep(lex, s->arity);
      MaxPoly f = mp_embed(normalize(ep.parse(), s->arity), s->arity);
      if (lex.peek().type != Token::Type::End)
        throw ParseError("trailing input in annotation", lineno,
                         lex.peek().col);
      if (head.text == "sup")
        out.sup[name.text] = f;
      else
        out.weight[name.text] = f;
    } else if (head.text == "status") {
      Token name = lex.take();
      lex.expect("=", "status entry");
      Token st = lex.take();
      if (st.text != "product" && st.text != "lex")
        throw ParseError("status must be 'product' or 'lex'", lineno, st.col);
      if (!p.symbols.is(name.text, Kind::Fct))
        throw ParseError("unknown function symbol '" + name.text + "'",
                         lineno, name.col);
      out.status[name.text] = st.text;
    } else if (head.text == "prec") {
      // prec a = b > c > d
      std::vector<std::vector<std::string>> groups;
      groups.push_back({});
      while (true) {
        Token name = lex.take();
        if (name.type != Token::Type::Ident &&
            name.type != Token::Type::Number)
          throw ParseError("expected symbol in prec entry", lineno, name.col);
        if (!p.symbols.find(name.text))
          throw ParseError("unknown symbol '" + name.text + "'", lineno,
                           name.col);
        groups.back().push_back(name.text);
        if (lex.at("=")) {
          lex.take();
          continue;
        }
        if (lex.at(">")) {
          lex.take();
          groups.push_back({});
          continue;
        }
        break;
      }
      if (lex.peek().type != Token::Type::End)
        throw ParseError("trailing input in prec entry", lineno,
                         lex.peek().col);
      for (auto& g : groups) out.prec.push_back(std::move(g));
      // Successive groups from one line are chained strictly; lines are
      // independent chains merged later by the RPO module.
    } else {
      throw ParseError("unknown annotation directive '" + head.text + "'",
                       lineno, head.col);
    }
  }
  return out;
}

std::string annotations_to_string(const AnnotationFile& a, const Program& p) {
  std::ostringstream os;
  for (const auto& [name, f] : a.sup) {
    const SymbolInfo* s = p.symbols.find(name);
    os << "sup " << name;
    if (s && s->arity > 0) {
      os << "(";
      for (int i = 0; i < s->arity; ++i) {
        if (i) os << ",";
        os << "X" << (i + 1);
      }
      os << ")";
    }
    os << " = " << f.to_string() << "\n";
  }
  for (const auto& [name, f] : a.weight) {
    const SymbolInfo* s = p.symbols.find(name);
    if (!s || s->kind != Kind::Fct) continue;  // weights live on Fct only
    os << "weight " << name;
    if (s && s->arity > 0) {
      os << "(";
      for (int i = 0; i < s->arity; ++i) {
        if (i) os << ",";
        os << "X" << (i + 1);
      }
      os << ")";
    }
    os << " = " << f.to_string() << "\n";
  }
  for (const auto& [name, st] : a.status)
    os << "status " << name << " = " << st << "\n";
  for (const auto& group : a.prec) {
    os << "prec";
    for (size_t i = 0; i < group.size(); ++i)
      os << (i ? " = " : " ") << group[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace qfc
