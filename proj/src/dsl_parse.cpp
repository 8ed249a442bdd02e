#include "kleinkit/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace kleinkit::dsl {

namespace {

std::string loc_prefix(SourceLoc loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": ";
}

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) {
      out += ", ";
    }
    out += expected[i];
  }
  return out;
}

} // namespace

ParseError::ParseError(SourceLoc loc, const std::string& message, std::vector<std::string> expected)
    : Error(loc_prefix(loc) + message + (expected.empty() ? "" : " (expected " + join_expected(expected) + ")")),
      loc_(loc), expected_(std::move(expected)) {}

SemanticError::SemanticError(SourceLoc loc, const std::string& message)
    : Error(loc_prefix(loc) + message), loc_(loc) {}

bool operator==(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.value == b.value && a.name == b.name && a.phase == b.phase &&
         a.exponent == b.exponent && a.args == b.args;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { ident, keyword, integer, rational, real, string, punct, end };

struct Token {
  Tok type = Tok::end;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string, std::less<>> keywords = {
    "mode",       "boson",        "fermion",      "exchange",     "q",          "formal", "let",
    "ann",        "cre",          "adj",          "phase",        "comm",       "acomm",  "qcomm",
    "map",        "assert_zero",  "assert_equal", "assert_bracket", "verify_map", "expect", "all",
    "numeric",    "dim",          "theta",        "tol",          "pi",
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::end, "end of input", loc});
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\'')) {
          id += advance();
        }
        out.push_back({keywords.contains(id) ? Tok::keyword : Tok::ident, id, loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number(loc));
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
          s += advance();
        }
        if (pos_ >= text_.size() || text_[pos_] != '"') {
          throw ParseError(loc, "unterminated string literal");
        }
        advance();
        out.push_back({Tok::string, s, loc});
      } else if (c == '-' && peek(1) == '>') {
        advance();
        advance();
        out.push_back({Tok::punct, "->", loc});
      } else if (std::string_view(";=,:()[]{}^*+-/").find(c) != std::string_view::npos) {
        out.push_back({Tok::punct, std::string(1, advance()), loc});
      } else {
        throw ParseError(loc, std::string("unexpected character '") + c + "'");
      }
    }
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          advance();
        }
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool digit_at(std::size_t ahead) const { return std::isdigit(static_cast<unsigned char>(peek(ahead))) != 0; }

  Token number(SourceLoc loc) {
    std::string s;
    while (digit_at(0)) {
      s += advance();
    }
    if (peek(0) == '/' && digit_at(1)) {
      s += advance();
      bool zero = true;
      while (digit_at(0)) {
        zero = zero && peek(0) == '0';
        s += advance();
      }
      if (zero) {
        throw ParseError(loc, "division by zero");
      }
      return {Tok::rational, s, loc};
    }
    bool real = false;
    if (peek(0) == '.' && digit_at(1)) {
      real = true;
      s += advance();
      while (digit_at(0)) {
        s += advance();
      }
    }
    if ((peek(0) == 'e' || peek(0) == 'E') &&
        (digit_at(1) || ((peek(1) == '-' || peek(1) == '+') && digit_at(2)))) {
      real = true;
      s += advance();
      if (peek(0) == '-' || peek(0) == '+') {
        s += advance();
      }
      while (digit_at(0)) {
        s += advance();
      }
    }
    return {real ? Tok::real : Tok::integer, s, loc};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (cur().type != Tok::end) {
      p.statements.push_back(statement());
    }
    return p;
  }

  double real_only() {
    double v = real();
    expect_end();
    return v;
  }

private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& next() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }

  bool is(std::string_view text) const {
    return (cur().type == Tok::punct || cur().type == Tok::keyword) && cur().text == text;
  }

  bool accept(std::string_view text) {
    if (is(text)) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(cur().loc, "unexpected " + describe(cur()), std::move(expected));
  }

  static std::string describe(const Token& t) {
    return t.type == Tok::end ? "end of input" : "'" + t.text + "'";
  }

  void expect(std::string_view text) {
    if (!accept(text)) {
      fail({"'" + std::string(text) + "'"});
    }
  }

  void expect_end() {
    if (cur().type != Tok::end) {
      fail({"end of input"});
    }
  }

  std::string ident() {
    if (cur().type != Tok::ident) {
      fail({"identifier"});
    }
    return toks_[pos_++].text;
  }

  std::int64_t integer() {
    const bool negative = accept("-");
    if (cur().type != Tok::integer) {
      fail({"integer"});
    }
    const auto& t = toks_[pos_++];
    try {
      std::int64_t v = std::stoll(t.text);
      return negative ? -v : v;
    } catch (const std::out_of_range&) {
      throw ParseError(t.loc, "integer out of range");
    }
  }

  Statement statement() {
    const SourceLoc loc = cur().loc;
    Statement s{loc, {}};
    if (accept("mode")) {
      ModeDecl d;
      d.name = ident();
      if (accept("boson")) {
        d.statistics = Statistics::boson;
      } else if (accept("fermion")) {
        d.statistics = Statistics::fermion;
      } else {
        fail({"'boson'", "'fermion'"});
      }
      s.node = d;
    } else if (accept("exchange")) {
      ExchangeDecl d;
      d.a = ident();
      d.b = ident();
      expect("=");
      d.value = expr();
      s.node = std::move(d);
    } else if (accept("q")) {
      QDecl d;
      if (accept("formal")) {
        d.kind = QDecl::Kind::formal;
      } else if (accept("=")) {
        d.kind = QDecl::Kind::value;
        d.value = expr();
      } else if (accept("theta")) {
        d.kind = QDecl::Kind::theta;
        d.theta = real();
      } else {
        fail({"'formal'", "'='", "'theta'"});
      }
      s.node = std::move(d);
    } else if (accept("let")) {
      LetDecl d;
      d.name = ident();
      expect("=");
      d.value = expr();
      s.node = std::move(d);
    } else if (accept("map")) {
      s.node = map_decl();
    } else if (accept("assert_zero")) {
      s.node = AssertZero{expr()};
    } else if (accept("assert_equal")) {
      AssertEqual d;
      d.lhs = expr();
      expect(",");
      d.rhs = expr();
      s.node = std::move(d);
    } else if (accept("assert_bracket")) {
      AssertBracket d;
      d.x = expr();
      expect(",");
      d.y = expr();
      expect(",");
      d.s = expr();
      if (accept("=")) {
        d.rhs = expr();
      }
      s.node = std::move(d);
    } else if (accept("verify_map")) {
      s.node = verify_map();
    } else if (accept("numeric")) {
      if (accept("dim")) {
        const SourceLoc at = cur().loc;
        const std::int64_t d = integer();
        if (d < 2) {
          throw ParseError(at, "dim must be at least 2");
        }
        s.node = NumericDim{static_cast<std::size_t>(d)};
      } else if (accept("theta")) {
        NumericTheta d;
        d.values.push_back(real());
        while (accept(",")) {
          d.values.push_back(real());
        }
        s.node = std::move(d);
      } else if (accept("tol")) {
        s.node = NumericTol{real()};
      } else {
        fail({"'dim'", "'theta'", "'tol'"});
      }
    } else {
      fail({"statement"});
    }
    expect(";");
    return s;
  }

  MapDecl map_decl() {
    MapDecl d;
    d.name = ident();
    expect("=");
    if (cur().type == Tok::string) {
      d.catalog = toks_[pos_++].text;
      return d;
    }
    expect("{");
    if (!is("}")) {
      do {
        MapEntry e;
        e.mode = ident();
        expect("->");
        e.factor = expr();
        d.entries.push_back(std::move(e));
      } while (accept(","));
    }
    expect("}");
    return d;
  }

  VerifyMap verify_map() {
    VerifyMap d;
    d.map = ident();
    if (accept("expect")) {
      do {
        if (accept("all")) {
          expect("=");
          d.all = expr();
        } else {
          ExpectEntry e;
          e.a = ident();
          e.b = ident();
          expect("=");
          e.value = expr();
          d.entries.push_back(std::move(e));
        }
      } while (accept(","));
    }
    return d;
  }

  // real := ['-'] (number ['*' 'pi'] | 'pi') ['/' number]
  double real() {
    const bool negative = accept("-");
    double v = 0.0;
    if (accept("pi")) {
      v = std::numbers::pi;
    } else {
      v = number_value();
      if (accept("*")) {
        expect("pi");
        v *= std::numbers::pi;
      }
    }
    if (accept("/")) {
      const SourceLoc at = cur().loc;
      const double d = number_value();
      if (d == 0.0) {
        throw ParseError(at, "division by zero");
      }
      v /= d;
    }
    return negative ? -v : v;
  }

  double number_value() {
    const auto& t = cur();
    if (t.type == Tok::integer || t.type == Tok::real) {
      ++pos_;
      return std::stod(t.text);
    }
    if (t.type == Tok::rational) {
      ++pos_;
      return Rational(t.text).get_d();
    }
    fail({"number"});
  }

  Expr make(Expr::Kind kind, SourceLoc loc, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = kind;
    e.loc = loc;
    e.args = std::move(args);
    return e;
  }

  Expr expr() {
    Expr lhs = term();
    while (is("+") || is("-")) {
      const SourceLoc loc = cur().loc;
      const bool plus = toks_[pos_++].text == "+";
      Expr rhs = term();
      lhs = make(plus ? Expr::Kind::add : Expr::Kind::sub, loc, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is("*") || is("/")) {
      const SourceLoc loc = cur().loc;
      const bool times = toks_[pos_++].text == "*";
      Expr rhs = unary();
      lhs = make(times ? Expr::Kind::mul : Expr::Kind::div, loc, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Expr unary() {
    const SourceLoc loc = cur().loc;
    if (accept("-")) {
      return make(Expr::Kind::neg, loc, {unary()});
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (is("^")) {
      const SourceLoc loc = cur().loc;
      ++pos_;
      Expr p = make(Expr::Kind::pow, loc, {std::move(base)});
      p.exponent = integer();
      return p;
    }
    return base;
  }

  static std::optional<GaussRational> literal_value(const Expr& e) {
    if (e.kind == Expr::Kind::number) {
      return e.value;
    }
    if (e.kind == Expr::Kind::neg && e.args[0].kind == Expr::Kind::number) {
      return -e.args[0].value;
    }
    return std::nullopt;
  }

  Expr primary() {
    const Token& t = cur();
    const SourceLoc loc = t.loc;
    if (t.type == Tok::integer || t.type == Tok::rational) {
      ++pos_;
      Expr e = make(Expr::Kind::number, loc);
      e.value = GaussRational(Rational(t.text));
      return e;
    }
    if (t.type == Tok::real) {
      throw ParseError(loc, "operator expressions take exact numbers; write '" + t.text +
                                "' as an integer or p/q rational");
    }
    if (t.type == Tok::ident) {
      ++pos_;
      Expr e = make(Expr::Kind::ref, loc);
      e.name = t.text;
      return e;
    }
    if (accept("q")) {
      return make(Expr::Kind::q, loc);
    }
    if (accept("(")) {
      Expr inner = expr();
      if (accept(",")) {
        Expr im = expr();
        expect(")");
        auto re_v = literal_value(inner);
        auto im_v = literal_value(im);
        if (!re_v || !im_v) {
          throw ParseError(loc, "complex literal parts must be rational numbers");
        }
        Expr e = make(Expr::Kind::complex, loc);
        e.value = GaussRational(re_v->re, im_v->re);
        return e;
      }
      expect(")");
      return inner;
    }
    if (accept("ann") || accept("cre")) {
      const bool annihilate = toks_[pos_ - 1].text == "ann";
      expect("(");
      Expr e = make(annihilate ? Expr::Kind::ann : Expr::Kind::cre, loc);
      e.name = ident();
      expect(")");
      return e;
    }
    if (accept("adj")) {
      expect("(");
      Expr e = make(Expr::Kind::adj, loc, {expr()});
      expect(")");
      return e;
    }
    if (accept("phase")) {
      expect("[");
      Expr e = make(Expr::Kind::phase, loc);
      if (!is("]")) {
        do {
          std::string name = ident();
          expect(":");
          e.phase.emplace_back(std::move(name), integer());
        } while (accept(","));
      }
      expect("]");
      return e;
    }
    if (accept("comm") || accept("acomm")) {
      const bool commutator = toks_[pos_ - 1].text == "comm";
      expect("(");
      Expr x = expr();
      expect(",");
      Expr y = expr();
      expect(")");
      return make(commutator ? Expr::Kind::comm : Expr::Kind::acomm, loc, {std::move(x), std::move(y)});
    }
    if (accept("qcomm")) {
      expect("(");
      Expr x = expr();
      expect(",");
      Expr y = expr();
      expect(",");
      Expr s = expr();
      expect(")");
      return make(Expr::Kind::qcomm, loc, {std::move(x), std::move(y), std::move(s)});
    }
    if (accept("map")) {
      expect("(");
      Expr e = make(Expr::Kind::apply_map, loc);
      e.name = ident();
      expect(",");
      e.args.push_back(expr());
      expect(")");
      return e;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

std::string real_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string phase_str(const PhaseEntries& p) {
  std::string s = "phase[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) {
      s += ",";
    }
    s += p[i].first + ":" + std::to_string(p[i].second);
  }
  return s + "]";
}

} // namespace

std::string render(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
  case K::number: return e.value.re.get_str();
  case K::complex: return "(" + e.value.re.get_str() + "," + e.value.im.get_str() + ")";
  case K::q: return "q";
  case K::ref: return e.name;
  case K::ann: return "ann(" + e.name + ")";
  case K::cre: return "cre(" + e.name + ")";
  case K::phase: return phase_str(e.phase);
  case K::adj: return "adj(" + render(e.args[0]) + ")";
  case K::comm: return "comm(" + render(e.args[0]) + ", " + render(e.args[1]) + ")";
  case K::acomm: return "acomm(" + render(e.args[0]) + ", " + render(e.args[1]) + ")";
  case K::qcomm:
    return "qcomm(" + render(e.args[0]) + ", " + render(e.args[1]) + ", " + render(e.args[2]) + ")";
  case K::apply_map: return "map(" + e.name + ", " + render(e.args[0]) + ")";
  case K::neg: return "(-" + render(e.args[0]) + ")";
  case K::add: return "(" + render(e.args[0]) + " + " + render(e.args[1]) + ")";
  case K::sub: return "(" + render(e.args[0]) + " - " + render(e.args[1]) + ")";
  case K::mul: return "(" + render(e.args[0]) + " * " + render(e.args[1]) + ")";
  case K::div: return "(" + render(e.args[0]) + " / " + render(e.args[1]) + ")";
  case K::pow: return render(e.args[0]) + "^" + std::to_string(e.exponent);
  }
  return {};
}

std::string render(const Statement& s) {
  struct Visitor {
    std::string operator()(const ModeDecl& d) const {
      return "mode " + d.name + " " + std::string(to_string(d.statistics)) + ";";
    }
    std::string operator()(const ExchangeDecl& d) const {
      return "exchange " + d.a + " " + d.b + " = " + render(d.value) + ";";
    }
    std::string operator()(const QDecl& d) const {
      switch (d.kind) {
      case QDecl::Kind::formal: return "q formal;";
      case QDecl::Kind::value: return "q = " + render(d.value) + ";";
      case QDecl::Kind::theta: return "q theta " + real_str(d.theta) + ";";
      }
      return {};
    }
    std::string operator()(const LetDecl& d) const { return "let " + d.name + " = " + render(d.value) + ";"; }
    std::string operator()(const MapDecl& d) const {
      if (d.catalog) {
        return "map " + d.name + " = \"" + *d.catalog + "\";";
      }
      std::string s = "map " + d.name + " = {";
      for (std::size_t i = 0; i < d.entries.size(); ++i) {
        s += (i ? ", " : " ") + d.entries[i].mode + " -> " + render(d.entries[i].factor);
      }
      return s + (d.entries.empty() ? "};" : " };");
    }
    std::string operator()(const AssertZero& d) const { return "assert_zero " + render(d.value) + ";"; }
    std::string operator()(const AssertEqual& d) const {
      return "assert_equal " + render(d.lhs) + ", " + render(d.rhs) + ";";
    }
    std::string operator()(const AssertBracket& d) const {
      std::string s = "assert_bracket " + render(d.x) + ", " + render(d.y) + ", " + render(d.s);
      if (d.rhs) {
        s += " = " + render(*d.rhs);
      }
      return s + ";";
    }
    std::string operator()(const VerifyMap& d) const {
      std::string s = "verify_map " + d.map;
      std::vector<std::string> parts;
      if (d.all) {
        parts.push_back("all = " + render(*d.all));
      }
      for (const auto& e : d.entries) {
        parts.push_back(e.a + " " + e.b + " = " + render(e.value));
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        s += (i ? ", " : " expect ") + parts[i];
      }
      return s + ";";
    }
    std::string operator()(const NumericDim& d) const { return "numeric dim " + std::to_string(d.dim) + ";"; }
    std::string operator()(const NumericTheta& d) const {
      std::string s = "numeric theta ";
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        s += (i ? ", " : "") + real_str(d.values[i]);
      }
      return s + ";";
    }
    std::string operator()(const NumericTol& d) const { return "numeric tol " + real_str(d.tol) + ";"; }
  };
  return std::visit(Visitor{}, s.node);
}

std::string render(const Program& program) {
  std::string out;
  for (const auto& s : program.statements) {
    out += render(s) + "\n";
  }
  return out;
}

Program parse(std::string_view text) {
  return Parser(Lexer(text).run()).program();
}

double parse_real(std::string_view text) {
  return Parser(Lexer(text).run()).real_only();
}

} // namespace kleinkit::dsl
