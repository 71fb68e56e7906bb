#include <cctype>

#include "nestsolve/errors.hpp"
#include "nestsolve/sum_expr.hpp"

namespace nestsolve {

namespace {

struct Tok {
  enum T { End, Num, Ident, Sym } t;
  std::string s;
  std::size_t pos;
};

std::vector<Tok> lex(const std::string& s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Num, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::isalpha(c) || c == '_' || c >= 0x80) {
      std::size_t j = i;
      while (j < s.size()) {
        unsigned char d = s[j];
        if (std::isalnum(d) || d == '_' || d >= 0x80)
          ++j;
        else
          break;
      }
      out.push_back({Tok::Ident, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::string("+-*/^()[]{},").find(static_cast<char>(c)) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool is_eps_name(const std::string& s) {
  return s == "eps" || s == "ep" || s == "epsilon" || s == "\xCE\xB5" || s == "\xCF\xB5";
}

class Parser {
 public:
  explicit Parser(const std::string& s) : toks_(lex(s)) {}

  Expr parse_all() {
    Expr e = expr();
    if (cur().t != Tok::End) fail("unexpected '" + cur().s + "'");
    return e;
  }

 private:
  std::vector<Tok> toks_;
  std::size_t i_ = 0;
  std::vector<std::string> vars_{"N"};

  const Tok& cur() const { return toks_[i_]; }
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, cur().pos); }
  bool sym(const char* s) const { return cur().t == Tok::Sym && cur().s == s; }
  void expect(const char* s) {
    if (!sym(s)) fail(std::string("expected '") + s + "'");
    ++i_;
  }
  const std::string& free_var() const { return vars_.back(); }

  Expr expr() {
    Expr e = term();
    while (sym("+") || sym("-")) {
      bool minus = cur().s == "-";
      ++i_;
      Expr t = term();
      e = minus ? e - t : e + t;
    }
    return e;
  }

  Expr term() {
    Expr e = unary();
    while (sym("*") || sym("/")) {
      bool div = cur().s == "/";
      std::size_t p = cur().pos;
      ++i_;
      Expr t = unary();
      if (div) {
        if (!t.is_rat()) throw ParseError("division by a non-rational expression", p);
        if (t.rf().is_zero()) throw ParseError("division by zero", p);
        e = e * Expr::rat(RatFun(1) / t.rf());
      } else {
        e = e * t;
      }
    }
    return e;
  }

  Expr unary() {
    if (sym("-")) {
      ++i_;
      return -unary();
    }
    if (sym("+")) {
      ++i_;
      return unary();
    }
    return power();
  }

  long integer_literal() {
    bool neg = false;
    if (sym("-")) {
      neg = true;
      ++i_;
    }
    if (cur().t != Tok::Num) fail("expected integer");
    long v = std::stol(cur().s);
    ++i_;
    return neg ? -v : v;
  }

  Q rational_literal() {
    long a = integer_literal();
    if (sym("/")) {
      ++i_;
      long b = integer_literal();
      if (b == 0) fail("zero denominator");
      Q q(a, b);
      q.canonicalize();
      return q;
    }
    return Q(a);
  }

  Expr power() {
    Expr base = primary();
    if (!sym("^")) return base;
    std::size_t p = cur().pos;
    ++i_;
    if (cur().t == Tok::Ident && cur().s == free_var()) {
      ++i_;
      if (!base.is_rat() || !base.rf().is_const()) throw ParseError("only constants can be raised to the bound variable", p);
      Q z = base.rf().const_value();
      if (z == 0) throw ParseError("0^N is not supported", p);
      return Expr::geometric(z);
    }
    long k;
    if (sym("(")) {
      ++i_;
      k = integer_literal();
      expect(")");
    } else {
      k = integer_literal();
    }
    if (base.is_rat()) {
      if (k < 0 && base.rf().is_zero()) throw ParseError("division by zero", p);
      return Expr::rat(base.rf().pow(k));
    }
    if (k < 0) throw ParseError("negative power of a non-rational expression", p);
    std::vector<Expr> fs(static_cast<std::size_t>(k), base);
    return Expr::mul(fs);
  }

  Expr primary() {
    const Tok t = cur();
    if (t.t == Tok::Num) {
      ++i_;
      return Expr::rat(RatFun(Q(Z(t.s))));
    }
    if (sym("(")) {
      ++i_;
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.t != Tok::Ident) fail(t.t == Tok::End ? "unexpected end of input" : "unexpected '" + t.s + "'");
    ++i_;
    if (t.s == "S" && sym("[")) return harmonic();
    if (t.s == "Sum" && sym("(")) return quantifier(true);
    if (t.s == "Prod" && sym("(")) return quantifier(false);
    if (t.s == free_var()) return Expr::rat(RatFun::var(NV));
    if (is_eps_name(t.s)) return Expr::rat(RatFun::var(EPS));
    if (t.s == "x") return Expr::rat(RatFun::var(X));
    throw ParseError("unknown identifier '" + t.s + "'", t.pos);
  }

  Expr harmonic() {
    expect("[");
    Word w;
    while (true) {
      if (sym("{")) {
        ++i_;
        long m = integer_literal();
        if (m < 1) fail("letter weight must be positive");
        expect(",");
        Q x = rational_literal();
        if (x == 0) fail("letter scale must be nonzero");
        expect("}");
        w.push_back({static_cast<int>(m), x});
      } else {
        long a = integer_literal();
        if (a == 0) fail("harmonic index 0");
        w.push_back({static_cast<int>(a > 0 ? a : -a), Q(a > 0 ? 1 : -1)});
      }
      if (sym(",")) {
        ++i_;
        continue;
      }
      break;
    }
    expect("]");
    expect("(");
    std::size_t p = cur().pos;
    Expr arg = expr();
    expect(")");
    // argument must be the free variable plus an integer
    if (!arg.is_rat() || !arg.rf().is_poly() || arg.rf().num().deg(NV) != 1 || arg.rf().mask() != (1u << NV))
      throw ParseError("harmonic sum argument must be " + free_var() + "+c", p);
    RatFun off = arg.rf() - RatFun::var(NV);
    if (!off.is_const() || !is_integer(off.const_value()))
      throw ParseError("harmonic sum argument must be " + free_var() + "+c", p);
    return shift(Expr::harmonic(w), off.const_value().get_num().get_si());
  }

  Expr quantifier(bool is_sum) {
    expect("(");
    if (cur().t != Tok::Ident) fail("expected bound variable name");
    std::string k = cur().s;
    if (is_eps_name(k) || k == "x" || k == "S" || k == "Sum" || k == "Prod") fail("reserved name '" + k + "'");
    ++i_;
    expect(",");
    long lower = integer_literal();
    if (lower < 0) fail("lower bound must be non-negative");
    expect(",");
    if (cur().t != Tok::Ident || cur().s != free_var()) fail("upper bound must be " + free_var());
    ++i_;
    expect(",");
    vars_.push_back(k);
    std::size_t p = cur().pos;
    Expr body = expr();
    vars_.pop_back();
    expect(")");
    if (is_sum) return Expr::sum(lower, body);
    if (!body.is_rat()) throw ParseError("product factor must be a rational function", p);
    return Expr::prod(lower, body.rf());
  }
};

}  // namespace

Expr parse_expr(const std::string& s) { return Parser(s).parse_all(); }

RatFun parse_ratfun(const std::string& s) {
  Expr e = parse_expr(s);
  if (!e.is_rat()) throw ParseError("expected a rational function", 0);
  return e.rf();
}

}  // namespace nestsolve
