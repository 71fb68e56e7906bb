#include "nestsolve/ratfun.hpp"

#include <sstream>

#include "nestsolve/errors.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

RatFun::RatFun(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (den.is_const()) {
    num_ = num * (Q(1) / den.const_value());
    den_ = Poly(1);
    return;
  }
  Poly g = gcd(num, den);
  Poly n = g.is_const() ? num : exact_div(num, g);
  Poly d = g.is_const() ? den : exact_div(den, g);
  Q l = d.lead().c;
  num_ = n * (Q(1) / l);
  den_ = d * (Q(1) / l);
}

Q RatFun::const_value() const {
  if (!is_const()) throw Error("not a constant: " + str());
  return num_.const_value();
}

RatFun RatFun::operator-() const { return RatFun(-num_, den_, Raw{}); }

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return RatFun(a.num_ + b.num_, a.den_);
  if (a.den_.is_const()) return RatFun(a.num_ * b.den_ + b.num_, b.den_, RatFun::Raw{});
  if (b.den_.is_const()) return RatFun(a.num_ + b.num_ * a.den_, a.den_, RatFun::Raw{});
  Poly g = gcd(a.den_, b.den_);
  if (g.is_const()) return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  Poly ad = exact_div(a.den_, g), bd = exact_div(b.den_, g);
  return RatFun(a.num_ * bd + b.num_ * ad, ad * b.den_);
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }

RatFun operator*(const RatFun& a, const RatFun& b) {
  if (a.is_zero() || b.is_zero()) return RatFun();
  if (a.is_const()) return RatFun(b.num_ * a.num_.const_value(), b.den_, RatFun::Raw{});
  if (b.is_const()) return RatFun(a.num_ * b.num_.const_value(), a.den_, RatFun::Raw{});
  Poly g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
  Poly an = g1.is_const() ? a.num_ : exact_div(a.num_, g1);
  Poly bd = g1.is_const() ? b.den_ : exact_div(b.den_, g1);
  Poly bn = g2.is_const() ? b.num_ : exact_div(b.num_, g2);
  Poly ad = g2.is_const() ? a.den_ : exact_div(a.den_, g2);
  Poly d = ad * bd;
  Q l = d.lead().c;
  return RatFun(an * bn * (Q(1) / l), d * (Q(1) / l), RatFun::Raw{});
}

RatFun operator/(const RatFun& a, const RatFun& b) {
  if (b.is_zero()) throw DivisionByZero();
  RatFun inv;
  Q l = b.num_.lead().c;
  inv = RatFun(b.den_ * (Q(1) / l), b.num_ * (Q(1) / l), RatFun::Raw{});
  return a * inv;
}

RatFun RatFun::pow(long k) const {
  if (k < 0) return RatFun(1) / pow(-k);
  return RatFun(num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)), Raw{});
}

RatFun RatFun::shift(Var v, long k) const {
  if (k == 0 || !has(v)) return *this;
  Poly n = num_.shift(v, Q(k)), d = den_.shift(v, Q(k));
  Q l = d.lead().c;
  return RatFun(n * (Q(1) / l), d * (Q(1) / l), Raw{});
}

RatFun RatFun::subst(Var v, const Q& val) const {
  if (!has(v)) return *this;
  Poly d = den_.subst(v, val);
  if (d.is_zero()) throw DivisionByZero();
  return RatFun(num_.subst(v, val), d);
}

RatFun RatFun::subst(Var v, const RatFun& val) const {
  if (!has(v)) return *this;
  // Horner over the coefficient lists in v
  auto hor = [&](const Poly& p) {
    auto c = p.coeffs(v);
    RatFun r = c.empty() ? RatFun() : RatFun(c.back());
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) r = r * val + RatFun(c[i]);
    return r;
  };
  return hor(num_) / hor(den_);
}

Q RatFun::eval_N(long n) const { return eval_N(Q(n)); }

Q RatFun::eval_N(const Q& n) const {
  Q d = den_.eval_N(n);
  if (d == 0) throw PoleAtPoint(n.get_num().get_si());
  return num_.eval_N(n) / d;
}

Q RatFun::eval(const Q& eps, const Q& x, const Q& n) const {
  Q d = den_.eval(eps, x, n);
  if (d == 0) throw PoleAtPoint(n.get_num().get_si());
  return num_.eval(eps, x, n) / d;
}

RatFun RatFun::eval_eps_zero() const {
  if (!has(EPS)) return *this;
  Poly d = den_.subst(EPS, Q(0));
  if (d.is_zero()) throw PoleAtZero();
  return RatFun(num_.subst(EPS, Q(0)), d);
}

int RatFun::eps_valuation() const {
  if (is_zero()) throw ZeroPolynomial();
  return num_.low_deg(EPS) - den_.low_deg(EPS);
}

std::vector<RatFun> RatFun::eps_series(int count, int* val) const {
  std::vector<RatFun> out;
  if (is_zero()) {
    if (val) *val = 0;
    out.assign(std::max(0, count), RatFun());
    return out;
  }
  auto nc = num_.coeffs(EPS), dc = den_.coeffs(EPS);
  int vn = 0, vd = 0;
  while (nc[vn].is_zero()) ++vn;
  while (dc[vd].is_zero()) ++vd;
  if (val) *val = vn - vd;
  auto ncoef = [&](int t) { return vn + t < static_cast<int>(nc.size()) ? nc[vn + t] : Poly(); };
  auto dcoef = [&](int t) { return vd + t < static_cast<int>(dc.size()) ? dc[vd + t] : Poly(); };
  RatFun d0inv = RatFun(Poly(1), dcoef(0));
  for (int t = 0; t < count; ++t) {
    RatFun acc(ncoef(t));
    for (int i = 1; i <= t; ++i) {
      Poly di = dcoef(i);
      if (!di.is_zero()) acc -= RatFun(di) * out[t - i];
    }
    out.push_back(acc * d0inv);
  }
  return out;
}

long RatFun::pole_threshold() const {
  if (den_.is_const()) return 0;
  if (den_.mask() != (1u << NV)) throw Error("pole_threshold needs a function of N only: " + str());
  return max_nonneg_root(den_) + 1;
}

int RatFun::compare(const RatFun& o) const {
  int c = num_.compare(o.num_);
  return c ? c : den_.compare(o.den_);
}

namespace {

bool single_term(const Poly& p) { return p.terms().size() <= 1; }

bool top_level_product(const std::string& s) {
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == '*' && depth == 0) return true;
  }
  return false;
}

std::string power(const std::string& base, int m) {
  return m == 1 ? base : base + "^" + std::to_string(m);
}

// p = scalar * (product string); product string empty when p is constant
std::string factored(const Poly& p, Q* scalar, const std::string& nn) {
  if (p.is_const()) {
    *scalar = p.const_value();
    return "";
  }
  unsigned m = p.mask();
  if (__builtin_popcount(m) == 1) {
    Var v = m == (1u << NV) ? NV : m == (1u << X) ? X : EPS;
    auto f = factor_linear(to_upoly(p, v));
    Q s = f.lc;
    std::ostringstream os;
    bool first = true;
    for (auto& [r, k] : f.roots) {
      if (!first) os << "*";
      first = false;
      if (r == 0) {
        os << power(v == NV ? nn : std::string(var_name(v)), k);
        continue;
      }
      // t - a/b = (b t - a)/b
      Z a = r.get_num(), b = r.get_den();
      Poly lin = Poly::var(v) * Q(b) - Poly(Q(a));
      os << power("(" + lin.str(nn) + ")", k);
      s /= qpow(Q(b), k);
    }
    if (f.rest.deg() >= 1) {
      Poly rest = from_upoly(f.rest, v);
      Q c = rest.scalar_content();
      s *= c;
      Poly prim = rest * (Q(1) / c);
      if (!first) os << "*";
      os << (single_term(prim) ? prim.str(nn) : "(" + prim.str(nn) + ")");
    }
    *scalar = s;
    return os.str();
  }
  Q c = p.scalar_content();
  *scalar = c;
  Poly prim = p * (Q(1) / c);
  return single_term(prim) ? prim.str(nn) : "(" + prim.str(nn) + ")";
}

}  // namespace

void RatFun::factored_parts(const std::string& nname, Q* k, std::string* ns, std::string* ds) const {
  Q sn, sd;
  *ns = factored(num_, &sn, nname);
  *ds = factored(den_, &sd, nname);
  *k = sn / sd;
}

std::string RatFun::str(const std::string& nname) const {
  if (num_.is_zero()) return "0";
  Q k;
  std::string ns, ds;
  factored_parts(nname, &k, &ns, &ds);
  Z p = k.get_num(), q = k.get_den();
  if (ds.empty() && q == 1 && p == 1 && !ns.empty() && ns.front() == '(' && ns.back() == ')' && !top_level_product(ns))
    ns = ns.substr(1, ns.size() - 2);
  std::string num;
  if (ns.empty()) {
    num = p.get_str();
  } else if (p == 1) {
    num = ns;
  } else if (p == -1) {
    num = "-" + ns;
  } else {
    num = p.get_str() + "*" + ns;
  }
  std::string den;
  if (q != 1 && !ds.empty())
    den = "(" + q.get_str() + "*" + ds + ")";
  else if (q != 1)
    den = q.get_str();
  else if (!ds.empty())
    den = top_level_product(ds) ? "(" + ds + ")" : ds;
  if (den.empty()) return num;
  return num + "/" + den;
}

RatFun falling_factorial(const RatFun& y, int k) {
  RatFun r(1);
  for (int j = 0; j < k; ++j) r *= y - RatFun(j);
  return r;
}

}  // namespace nestsolve
