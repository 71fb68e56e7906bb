#include "nestsolve/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nestsolve/errors.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

Q parse_rational(const std::string& s) {
  Q q;
  std::string t = s;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  if (q.set_str(t, 10) != 0) throw Error("bad rational '" + s + "'");
  if (q.get_den() == 0) throw DivisionByZero();
  q.canonicalize();
  return q;
}

Q qpow(const Q& base, long e) {
  if (e < 0) {
    if (base == 0) throw DivisionByZero();
    return qpow(Q(1) / base, -e);
  }
  Q r = 1, b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

const char* var_name(Var v) {
  switch (v) {
    case EPS: return "eps";
    case X: return "x";
    default: return "N";
  }
}

bool term_greater(const Exp& a, const Exp& b) {
  int da = a[0] + a[1] + a[2], db = b[0] + b[1] + b[2];
  if (da != db) return da > db;
  for (int v = kVars - 1; v >= 0; --v)
    if (a[v] != b[v]) return a[v] > b[v];
  return false;
}

namespace {
struct ExpGreater {
  bool operator()(const Exp& a, const Exp& b) const { return term_greater(a, b); }
};
using TermMap = std::map<Exp, Q, ExpGreater>;

Poly from_map(TermMap& m) {
  std::vector<Term> v;
  v.reserve(m.size());
  for (auto& [e, c] : m)
    if (c != 0) v.push_back({e, std::move(c)});
  return Poly::from_terms(std::move(v));
}
}  // namespace

Poly::Poly(const Q& c) {
  if (c != 0) t_.push_back({{0, 0, 0}, c});
}

Poly Poly::var(Var v) {
  Exp e{0, 0, 0};
  e[v] = 1;
  return monomial(e, 1);
}

Poly Poly::monomial(const Exp& e, const Q& c) {
  Poly p;
  if (c != 0) p.t_.push_back({e, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  Poly p;
  p.t_ = std::move(terms);
  return p;
}

bool Poly::is_const() const {
  return t_.empty() || (t_.size() == 1 && t_[0].e == Exp{0, 0, 0});
}

Q Poly::const_value() const {
  if (t_.empty()) return 0;
  return t_.back().e == Exp{0, 0, 0} ? t_.back().c : Q(0);
}

int Poly::deg(Var v) const {
  int d = t_.empty() ? -1 : 0;
  for (auto& t : t_) d = std::max(d, t.e[v]);
  return d;
}

int Poly::low_deg(Var v) const {
  if (t_.empty()) return 0;
  int d = t_[0].e[v];
  for (auto& t : t_) d = std::min(d, t.e[v]);
  return d;
}

int Poly::total_deg() const {
  if (t_.empty()) return -1;
  auto& e = t_[0].e;
  return e[0] + e[1] + e[2];
}

unsigned Poly::mask() const {
  unsigned m = 0;
  for (auto& t : t_)
    for (int v = 0; v < kVars; ++v)
      if (t.e[v]) m |= 1u << v;
  return m;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.t_) t.c = -t.c;
  return r;
}

static std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool sub) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && term_greater(a[i].e, b[j].e))) {
      r.push_back(a[i++]);
    } else if (i == a.size() || term_greater(b[j].e, a[i].e)) {
      r.push_back({b[j].e, sub ? Q(-b[j].c) : b[j].c});
      ++j;
    } else {
      Q c = sub ? Q(a[i].c - b[j].c) : Q(a[i].c + b[j].c);
      if (c != 0) r.push_back({a[i].e, c});
      ++i;
      ++j;
    }
  }
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  t_ = merge(t_, o.t_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  t_ = merge(t_, o.t_, true);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.t_.size() == 1 && a.t_[0].e == Exp{0, 0, 0}) return b * a.t_[0].c;
  if (b.t_.size() == 1 && b.t_[0].e == Exp{0, 0, 0}) return a * b.t_[0].c;
  TermMap m;
  Q tmp;
  for (auto& x : a.t_)
    for (auto& y : b.t_) {
      Exp e{x.e[0] + y.e[0], x.e[1] + y.e[1], x.e[2] + y.e[2]};
      tmp = x.c * y.c;
      auto it = m.find(e);
      if (it == m.end())
        m.emplace(e, tmp);
      else
        it->second += tmp;
    }
  return from_map(m);
}

Poly operator*(const Poly& a, const Q& c) {
  if (c == 0) return Poly();
  Poly r = a;
  for (auto& t : r.t_) t.c *= c;
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (t_[i].e != o.t_[i].e || t_[i].c != o.t_[i].c) return false;
  return true;
}

int Poly::compare(const Poly& o) const {
  std::size_t n = std::min(t_.size(), o.t_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (t_[i].e != o.t_[i].e) return term_greater(t_[i].e, o.t_[i].e) ? 1 : -1;
    int c = cmp(t_[i].c, o.t_[i].c);
    if (c) return c < 0 ? -1 : 1;
  }
  if (t_.size() != o.t_.size()) return t_.size() < o.t_.size() ? -1 : 1;
  return 0;
}

Poly Poly::pow(unsigned k) const {
  Poly r(1), b = *this;
  while (k) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

std::vector<Poly> Poly::coeffs(Var v) const {
  int d = deg(v);
  if (d < 0) return {};
  std::vector<std::vector<Term>> parts(d + 1);
  for (auto& t : t_) {
    Exp e = t.e;
    int k = e[v];
    e[v] = 0;
    parts[k].push_back({e, t.c});
  }
  std::vector<Poly> r;
  r.reserve(d + 1);
  for (auto& p : parts) r.push_back(from_terms(std::move(p)));  // order preserved
  return r;
}

Poly Poly::mul_var(Var v, int k) const {
  if (k == 0) return *this;
  Poly r = *this;
  for (auto& t : r.t_) t.e[v] += k;
  // shifting one variable may reorder terms under the graded order
  std::sort(r.t_.begin(), r.t_.end(), [](const Term& a, const Term& b) { return term_greater(a.e, b.e); });
  return r;
}

Poly Poly::from_coeffs(const std::vector<Poly>& c, Var v) {
  Poly r;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c[i].is_zero()) r += c[i].mul_var(v, static_cast<int>(i));
  return r;
}

Poly Poly::shift(Var v, const Q& k) const {
  if (k == 0 || !has(v)) return *this;
  auto c = coeffs(v);
  Poly lin = var(v) + Poly(k);
  Poly r = c.back();
  for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) r = r * lin + c[i];
  return r;
}

Poly Poly::subst(Var v, const Q& val) const {
  if (!has(v)) return *this;
  TermMap m;
  for (auto& t : t_) {
    Exp e = t.e;
    Q c = t.c * qpow(val, e[v]);
    e[v] = 0;
    if (c == 0) continue;
    auto it = m.find(e);
    if (it == m.end())
      m.emplace(e, c);
    else
      it->second += c;
  }
  return from_map(m);
}

Poly Poly::subst(Var v, const Poly& val) const {
  if (!has(v)) return *this;
  auto c = coeffs(v);
  Poly r = c.back();
  for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) r = r * val + c[i];
  return r;
}

Q Poly::eval(const Q& eps, const Q& x, const Q& n) const {
  Q r = 0;
  for (auto& t : t_) r += t.c * qpow(eps, t.e[0]) * qpow(x, t.e[1]) * qpow(n, t.e[2]);
  return r;
}

Q Poly::eval_N(const Q& n) const {
  if (mask() & ~(1u << NV)) throw Error("eval_N on polynomial with eps/x");
  if (t_.empty()) return 0;
  // terms are sorted by descending N degree
  Q r = 0;
  int cur = t_[0].e[NV];
  for (auto& t : t_) {
    while (cur > t.e[NV]) {
      r *= n;
      --cur;
    }
    r += t.c;
  }
  while (cur > 0) {
    r *= n;
    --cur;
  }
  return r;
}

Q Poly::scalar_content() const {
  if (t_.empty()) return 1;
  Z g = 0, l = 1;
  for (auto& t : t_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
  }
  Q c(g, l);
  c.canonicalize();
  if (t_[0].c < 0) c = -c;
  return c;
}

Poly Poly::monic() const {
  if (t_.empty()) return *this;
  return *this * (Q(1) / t_[0].c);
}

std::string Poly::str(const std::string& nname) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& t : t_) {
    Q c = t.c;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? "-" : "+");
    }
    first = false;
    bool unit = t.e == Exp{0, 0, 0};
    bool wrote = false;
    if (c != 1 || unit) {
      os << c.get_str();
      wrote = true;
    }
    for (int v = kVars - 1; v >= 0; --v) {
      // print order N, x, eps
      Var var = static_cast<Var>(v == 2 ? NV : v == 1 ? X : EPS);
      int k = t.e[var];
      if (!k) continue;
      if (wrote) os << "*";
      os << (var == NV ? nname : std::string(var_name(var)));
      if (k > 1) os << "^" << k;
      wrote = true;
    }
  }
  return os.str();
}

bool try_div(const Poly& a, const Poly& b, Poly* q) {
  if (b.is_zero()) throw DivisionByZero();
  if (b.is_const()) {
    if (q) *q = a * (Q(1) / b.const_value());
    return true;
  }
  std::vector<Term> quot;
  Poly r = a;
  const Term& lb = b.lead();
  while (!r.is_zero()) {
    const Term& lr = r.lead();
    Exp e;
    for (int v = 0; v < kVars; ++v) {
      e[v] = lr.e[v] - lb.e[v];
      if (e[v] < 0) return false;
    }
    Q c = lr.c / lb.c;
    quot.push_back({e, c});
    r -= b * Poly::monomial(e, c);
  }
  if (q) *q = Poly::from_terms(std::move(quot));
  return true;
}

Poly exact_div(const Poly& a, const Poly& b) {
  Poly q;
  if (!try_div(a, b, &q)) throw Error("inexact polynomial division");
  return q;
}

namespace {

Var main_var(unsigned mask) {
  if (mask & (1u << NV)) return NV;
  if (mask & (1u << X)) return X;
  return EPS;
}

int popcount(unsigned m) { return __builtin_popcount(m); }

// pseudo-remainder of a by b w.r.t. v
Poly prem(const Poly& a, const Poly& b, Var v) {
  auto bc = b.coeffs(v);
  int db = static_cast<int>(bc.size()) - 1;
  const Poly& lb = bc.back();
  Poly r = a;
  int dr = r.deg(v);
  int steps = dr - db + 1;
  while (!r.is_zero() && (dr = r.deg(v)) >= db) {
    auto rc = r.coeffs(v);
    Poly lr = rc.back();
    r = r * lb - (b * lr).mul_var(v, dr - db);
    --steps;
  }
  if (steps > 0 && !r.is_zero()) r = r * lb.pow(steps);
  return r;
}

Poly normalize_scalar(const Poly& p) {
  if (p.is_zero()) return p;
  return p * (Q(1) / p.scalar_content());
}

Poly pp(const Poly& p, Var v) {
  Poly c = content(p, v);
  Poly r = c.is_const() ? p : exact_div(p, c);
  return normalize_scalar(r);
}

}  // namespace

Poly content(const Poly& p, Var v) {
  auto c = p.coeffs(v);
  Poly g;
  for (auto& x : c) {
    if (x.is_zero()) continue;
    g = gcd(g, x);
    if (g.is_const()) return Poly(1);
  }
  return g;
}

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_const() || b.is_const()) return Poly(1);
  unsigned m = a.mask() | b.mask();
  if (popcount(m) == 1) {
    Var v = main_var(m);
    return from_upoly(gcd(to_upoly(a, v), to_upoly(b, v)), v);
  }
  Var v = main_var(m);
  if (!a.has(v)) return gcd(a, content(b, v));
  if (!b.has(v)) return gcd(content(a, v), b);
  Poly ca = content(a, v), cb = content(b, v);
  Poly c = gcd(ca, cb);
  Poly A = ca.is_const() ? a : exact_div(a, ca);
  Poly B = cb.is_const() ? b : exact_div(b, cb);
  A = normalize_scalar(A);
  B = normalize_scalar(B);
  if (A.deg(v) < B.deg(v)) std::swap(A, B);
  // cheap divisibility check first
  Poly q;
  if (try_div(A, B, &q)) return (c * B).monic();
  while (!B.is_zero() && B.deg(v) > 0) {
    Poly R = prem(A, B, v);
    A = B;
    B = R.is_zero() ? R : pp(R, v);
  }
  Poly g = B.is_zero() ? pp(A, v) : Poly(1);
  return (c * g).monic();
}

Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  Poly g = gcd(a, b);
  return (exact_div(a, g) * b).monic();
}

}  // namespace nestsolve
