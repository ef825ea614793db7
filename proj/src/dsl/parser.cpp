#include <cctype>
#include <set>

#include "ppgsmc/dsl/ast.hpp"
#include "ppgsmc/errors.hpp"

namespace ppgsmc::dsl {

namespace {

enum class Tok {
  End, Number, Ident,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi,
  Tilde, Assign, Eq, EqEq, Ne, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Pipe, OrOr, AndAnd, Bang
};

struct Token {
  Tok kind;
  std::string text;
  int line, column;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Tilde: return "'~'";
    case Tok::Assign: return "':='";
    case Tok::Eq: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Pipe: return "'|'";
    case Tok::OrOr: return "'||'";
    case Tok::AndAnd: return "'&&'";
    case Tok::Bang: return "'!'";
  }
  return "token";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l0 = line, c0 = col;
      advance(2);
      while (i < src.size() && !(src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/')) advance(1);
      if (i >= src.size()) throw ParseError("unterminated comment", l0, c0);
      advance(2);
      continue;
    }
    int l = line, cl = col;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    Tok t;
    std::size_t len = 2;
    if (two(':', '=')) t = Tok::Assign;
    else if (two('=', '=')) t = Tok::EqEq;
    else if (two('!', '=')) t = Tok::Ne;
    else if (two('<', '=')) t = Tok::Le;
    else if (two('>', '=')) t = Tok::Ge;
    else if (two('|', '|')) t = Tok::OrOr;
    else if (two('&', '&')) t = Tok::AndAnd;
    else {
      len = 1;
      switch (c) {
        case '(': t = Tok::LParen; break;
        case ')': t = Tok::RParen; break;
        case '{': t = Tok::LBrace; break;
        case '}': t = Tok::RBrace; break;
        case '[': t = Tok::LBracket; break;
        case ']': t = Tok::RBracket; break;
        case ',': t = Tok::Comma; break;
        case ';': t = Tok::Semi; break;
        case '~': t = Tok::Tilde; break;
        case '=': t = Tok::Eq; break;
        case '<': t = Tok::Lt; break;
        case '>': t = Tok::Gt; break;
        case '+': t = Tok::Plus; break;
        case '-': t = Tok::Minus; break;
        case '*': t = Tok::Star; break;
        case '/': t = Tok::Slash; break;
        case '|': t = Tok::Pipe; break;
        case '!': t = Tok::Bang; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
      }
    }
    out.push_back({t, std::string(src.substr(i, len)), l, cl});
    advance(len);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct DistName {
  const char* name;
  DistKind kind;
};

const DistName kDistNames[] = {
    {"B", DistKind::Bernoulli},        {"Bernoulli", DistKind::Bernoulli},   {"flip", DistKind::Bernoulli},
    {"U", DistKind::Uniform},          {"Uniform", DistKind::Uniform},       {"uniform", DistKind::Uniform},
    {"N", DistKind::Normal},           {"Normal", DistKind::Normal},         {"Gaussian", DistKind::Normal},
    {"gaussian", DistKind::Normal},    {"N_T", DistKind::TruncNormal},       {"TruncNormal", DistKind::TruncNormal},
    {"trunc_gauss", DistKind::TruncNormal}, {"DU", DistKind::DiscreteUniform},
    {"DiscreteUniform", DistKind::DiscreteUniform}, {"Dirac", DistKind::Dirac},
};

const std::set<std::string> kKeywords = {"if",   "else",  "while", "observe", "score", "skip",
                                         "param", "return", "true", "false",  "inf",   "density_ratio"};

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParamMap& overrides) : toks_(std::move(toks)), overrides_(overrides) {}

  Expr lone_expression(const std::vector<std::string>& names) {
    for (const auto& n : names) slot(n);
    frozen_ = true;
    Expr e = expr();
    if (!at(Tok::End)) fail("unexpected trailing input");
    return e;
  }

  ProgramAst run() {
    while (accept(Tok::Semi)) {
    }
    while (!at(Tok::End) && !at_word("return")) {
      auto s = statement();
      if (s) ast_.body.push_back(std::move(*s));
      while (accept(Tok::Semi)) {
      }
    }
    if (at_word("return")) {
      next();
      ast_.result = expr();
      while (accept(Tok::Semi)) {
      }
    }
    if (!at(Tok::End)) fail("expected end of input after return");
    for (const auto& [name, value] : overrides_)
      if (!ast_.params.count(name)) throw Error("unknown parameter '" + name + "'");
    return std::move(ast_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const ParamMap& overrides_;
  ProgramAst ast_;
  std::map<std::string, int> slots_;
  bool frozen_ = false;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + " (found " + found + ")", t.line, t.column);
  }
  const Token& expect(Tok t, const char* what = nullptr) {
    if (!at(t)) fail(std::string("expected ") + (what ? what : describe(t)));
    return next();
  }

  int slot(const std::string& name) {
    auto it = slots_.find(name);
    if (it != slots_.end()) return it->second;
    if (frozen_) fail("unknown variable '" + name + "'");
    int i = static_cast<int>(ast_.var_names.size());
    slots_[name] = i;
    ast_.var_names.push_back(name);
    return i;
  }

  std::optional<Stmt> statement() {
    const Token& t = peek();
    Stmt s;
    s.line = t.line;
    s.column = t.column;
    if (at(Tok::LBrace)) {
      s.kind = Stmt::Kind::Block;
      s.body = block();
      return s;
    }
    if (t.kind != Tok::Ident) fail("expected a statement");
    if (t.text == "skip") {
      next();
      s.kind = Stmt::Kind::Skip;
      return s;
    }
    if (t.text == "param") {
      next();
      std::string name = expect(Tok::Ident, "parameter name").text;
      if (!accept(Tok::Eq) && !accept(Tok::Assign)) fail("expected '=' in param declaration");
      bool neg = accept(Tok::Minus);
      std::string value = expect(Tok::Number, "numeric parameter value").text;
      if (neg) value = "-" + value;
      auto o = overrides_.find(name);
      if (o != overrides_.end()) value = o->second;
      ast_.params[name] = value;
      return std::nullopt;
    }
    if (t.text == "observe") {
      next();
      expect(Tok::LParen);
      Expr p = expr();
      expect(Tok::RParen);
      s.kind = Stmt::Kind::Observe;
      s.score = score_pred(std::move(p));
      return s;
    }
    if (t.text == "score") {
      next();
      expect(Tok::LParen);
      s.kind = Stmt::Kind::Score;
      if (at_word("density_ratio")) {
        next();
        expect(Tok::LParen);
        DistributionSpec d = dist_call();
        expect(Tok::Comma);
        Expr at_e = expr();
        expect(Tok::Comma);
        Expr norm = expr();
        expect(Tok::RParen);
        s.score = score_density_ratio(std::move(d), std::move(at_e), std::move(norm));
      } else {
        s.score = score_clamped(expr());
      }
      expect(Tok::RParen);
      return s;
    }
    if (t.text == "if") {
      next();
      expect(Tok::LParen);
      s.expr = as_predicate(expr());
      expect(Tok::RParen);
      s.kind = Stmt::Kind::If;
      s.body = branch_body();
      while (at(Tok::Semi) && peek(1).kind == Tok::Ident && peek(1).text == "else") next();
      if (at_word("else")) {
        next();
        s.orelse = branch_body();
      }
      return s;
    }
    if (t.text == "while") {
      next();
      expect(Tok::LParen);
      s.expr = as_predicate(expr());
      expect(Tok::RParen);
      s.kind = Stmt::Kind::While;
      s.body = branch_body();
      return s;
    }
    if (kKeywords.count(t.text) || is_distribution_name(t.text)) fail("unexpected keyword '" + t.text + "'");
    std::string name = next().text;
    if (ast_.params.count(name)) fail("cannot assign to parameter '" + name + "'");
    if (accept(Tok::Tilde)) {
      DistributionSpec d = dist_call();
      s.kind = Stmt::Kind::Sample;
      s.target = slot(name);
      s.dist = std::move(d);
      return s;
    }
    if (!accept(Tok::Assign) && !accept(Tok::Eq)) fail("expected '~', ':=' or '=' after '" + name + "'");
    if (peek().kind == Tok::Ident && is_distribution_name(peek().text) && peek(1).kind == Tok::LParen) {
      DistributionSpec d = dist_call();
      s.kind = Stmt::Kind::Sample;
      s.target = slot(name);
      s.dist = std::move(d);
      return s;
    }
    Expr e = expr();
    s.kind = Stmt::Kind::Assign;
    s.target = slot(name);
    s.expr = std::move(e);
    return s;
  }

  std::vector<Stmt> block() {
    expect(Tok::LBrace);
    std::vector<Stmt> out;
    while (accept(Tok::Semi)) {
    }
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("expected '}'");
      auto s = statement();
      if (s) out.push_back(std::move(*s));
      while (accept(Tok::Semi)) {
      }
    }
    expect(Tok::RBrace);
    return out;
  }

  std::vector<Stmt> branch_body() {
    if (at(Tok::LBrace)) return block();
    std::vector<Stmt> out;
    auto s = statement();
    if (s) out.push_back(std::move(*s));
    return out;
  }

  DistributionSpec dist_call() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected a distribution");
    DistKind kind{};
    bool found = false;
    for (const auto& d : kDistNames)
      if (t.text == d.name) {
        kind = d.kind;
        found = true;
      }
    if (!found) fail("unknown distribution '" + t.text + "'");
    int l = t.line, c = t.column;
    next();
    expect(Tok::LParen);
    std::vector<Expr> args;
    if (!at(Tok::RParen)) {
      args.push_back(expr());
      while (accept(Tok::Comma)) args.push_back(expr());
    }
    expect(Tok::RParen);
    int want = param_count(kind);
    if ((want >= 0 && static_cast<int>(args.size()) != want) || (want < 0 && args.empty()))
      throw ParseError(std::string(dist_name(kind)) + " takes " +
                           (want < 0 ? std::string("at least one") : std::to_string(want)) + " argument(s)",
                       l, c);
    return make_dist(kind, std::move(args));
  }

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr e = and_expr();
    while (accept(Tok::OrOr)) e = as_predicate(std::move(e)) || as_predicate(and_expr());
    return e;
  }

  Expr and_expr() {
    Expr e = not_expr();
    while (accept(Tok::AndAnd)) e = as_predicate(std::move(e)) && as_predicate(not_expr());
    return e;
  }

  Expr not_expr() {
    if (accept(Tok::Bang)) return !as_predicate(not_expr());
    return cmp_expr();
  }

  Expr cmp_expr() {
    Expr e = add_expr();
    Op op;
    switch (peek().kind) {
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      case Tok::EqEq: op = Op::Eq; break;
      case Tok::Ne: op = Op::Ne; break;
      case Tok::Eq: fail("use '==' for comparison");
      default: return e;
    }
    next();
    return apply(op, std::move(e), add_expr());
  }

  Expr add_expr() {
    Expr e = mul_expr();
    for (;;) {
      if (accept(Tok::Plus))
        e = std::move(e) + mul_expr();
      else if (accept(Tok::Minus))
        e = std::move(e) - mul_expr();
      else
        return e;
    }
  }

  Expr mul_expr() {
    Expr e = unary_expr();
    for (;;) {
      if (accept(Tok::Star))
        e = std::move(e) * unary_expr();
      else if (accept(Tok::Slash))
        e = std::move(e) / unary_expr();
      else
        return e;
    }
  }

  Expr unary_expr() {
    if (accept(Tok::Minus)) {
      Expr e = unary_expr();
      if (e.op == Op::Literal) {
        e.value = -e.value;
        if (!e.text.empty()) e.text = e.text[0] == '-' ? e.text.substr(1) : "-" + e.text;
        return e;
      }
      return -std::move(e);
    }
    if (accept(Tok::Bang)) return !as_predicate(unary_expr());
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        std::string text = next().text;
        return lit(text);
      }
      case Tok::LParen: {
        next();
        Expr e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Pipe: {
        next();
        Expr e = expr();
        expect(Tok::Pipe, "closing '|'");
        return abs(std::move(e));
      }
      case Tok::LBracket: {
        next();
        Expr e = expr();
        expect(Tok::RBracket);
        return iverson(std::move(e));
      }
      case Tok::Ident: break;
      default: fail("expected an expression");
    }
    std::string name = t.text;
    if (name == "true") return next(), lit(1.0);
    if (name == "false") return next(), lit(0.0);
    if (name == "inf") return next(), lit(ext::inf);
    if (peek(1).kind == Tok::LParen) {
      static const std::map<std::string, std::pair<Op, int>> fns = {
          {"abs", {Op::Abs, 1}}, {"min", {Op::Min, 2}}, {"max", {Op::Max, 2}},
          {"sqrt", {Op::Sqrt, 1}}, {"exp", {Op::Exp, 1}}, {"log", {Op::Log, 1}}};
      auto f = fns.find(name);
      if (f == fns.end()) {
        if (is_distribution_name(name)) fail("sampling is only allowed as a statement: write 'v ~ " + name + "(...)'");
        fail("unknown function '" + name + "'");
      }
      next();
      expect(Tok::LParen);
      std::vector<Expr> args;
      args.push_back(expr());
      while (accept(Tok::Comma)) args.push_back(expr());
      if (static_cast<int>(args.size()) != f->second.second) fail("wrong number of arguments to '" + name + "'");
      expect(Tok::RParen);
      if (args.size() == 1) return apply(f->second.first, std::move(args[0]));
      return apply(f->second.first, std::move(args[0]), std::move(args[1]));
    }
    if (kKeywords.count(name)) fail("unexpected keyword '" + name + "'");
    next();
    auto p = ast_.params.find(name);
    if (p != ast_.params.end()) return lit(p->second);
    return var(slot(name));
  }
};

}  // namespace

bool is_distribution_name(std::string_view name) {
  for (const auto& d : kDistNames)
    if (name == d.name) return true;
  return false;
}

Expr parse_expression(std::string_view text, const std::vector<std::string>& var_names) {
  ParamMap none;
  return Parser(lex(text), none).lone_expression(var_names);
}

ProgramAst parse(std::string_view source, const ParamMap& overrides) {
  return Parser(lex(source), overrides).run();
}

}  // namespace ppgsmc::dsl
