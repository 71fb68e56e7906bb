#include "nestsolve/univariate.hpp"

#include <algorithm>
#include <map>

#include "nestsolve/errors.hpp"

namespace nestsolve {

void UPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

Q UPoly::eval(const Q& t) const {
  Q r = 0;
  for (int i = deg(); i >= 0; --i) {
    r *= t;
    r += c[i];
  }
  return r;
}

UPoly UPoly::operator+(const UPoly& o) const {
  std::vector<Q> r(std::max(c.size(), o.c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
  for (std::size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
  return UPoly(std::move(r));
}

UPoly UPoly::operator-(const UPoly& o) const { return *this + o * Q(-1); }

UPoly UPoly::operator*(const UPoly& o) const {
  if (is_zero() || o.is_zero()) return UPoly();
  std::vector<Q> r(c.size() + o.c.size() - 1);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
  return UPoly(std::move(r));
}

UPoly UPoly::operator*(const Q& a) const {
  if (a == 0) return UPoly();
  UPoly r = *this;
  for (auto& x : r.c) x *= a;
  return r;
}

UPoly UPoly::taylor_shift(const Q& a) const {
  if (is_zero() || a == 0) return *this;
  // Horner with (t+a)
  UPoly r;
  UPoly lin = UPoly::linear(1, a);
  for (int i = deg(); i >= 0; --i) r = r * lin + UPoly::constant(c[i]);
  return r;
}

UPoly UPoly::monic() const {
  if (is_zero()) return *this;
  return *this * (Q(1) / lc());
}

UPoly UPoly::pow(unsigned k) const {
  UPoly r = UPoly::constant(1), b = *this;
  while (k) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

void divmod(const UPoly& a, const UPoly& b, UPoly* q, UPoly* r) {
  if (b.is_zero()) throw DivisionByZero();
  std::vector<Q> rem = a.c;
  int db = b.deg();
  int da = a.deg();
  std::vector<Q> quo(da >= db ? da - db + 1 : 0);
  Q inv = Q(1) / b.lc();
  for (int i = da; i >= db; --i) {
    if (rem[i] == 0) continue;
    Q f = rem[i] * inv;
    quo[i - db] = f;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c[j];
  }
  if (q) *q = UPoly(std::move(quo));
  if (r) {
    rem.resize(std::max(0, db));
    *r = UPoly(std::move(rem));
  }
}

UPoly gcd(const UPoly& a, const UPoly& b) {
  UPoly x = a.monic(), y = b.monic();
  while (!y.is_zero()) {
    UPoly r;
    divmod(x, y, nullptr, &r);
    x = y;
    y = r.monic();
  }
  return x.monic();
}

UPoly to_upoly(const Poly& p, Var v) {
  if (p.mask() & ~(1u << v)) throw Error("to_upoly: polynomial not univariate");
  std::vector<Q> c(std::max(0, p.deg(v) + 1));
  for (auto& t : p.terms()) c[t.e[v]] = t.c;
  return UPoly(std::move(c));
}

Poly from_upoly(const UPoly& p, Var v) {
  std::vector<Term> t;
  for (int i = p.deg(); i >= 0; --i) {
    if (p.c[i] == 0) continue;
    Exp e{0, 0, 0};
    e[v] = i;
    t.push_back({e, p.c[i]});
  }
  return Poly::from_terms(std::move(t));
}

namespace {

Z small_factor(const Z& n) {
  // Pollard-Brent rho; n composite and odd
  for (unsigned long c = 1;; ++c) {
    Z y = 2, x, g = 1, q = 1, ys;
    unsigned long r = 1, m = 64;
    auto f = [&](const Z& v) {
      Z w = v * v + c;
      mpz_mod(w.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
      return w;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          Z d = x - y;
          q = q * abs(d);
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        Z d = x - ys;
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(Z n, std::map<Z, int>& out) {
  if (n < 0) n = -n;
  if (n <= 1) return;
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out[Z(p)]++;
      n /= p;
    }
  }
  for (unsigned long p = 7; p < 10000 && Z(p) * p <= n; p += 2) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out[Z(p)]++;
      n /= p;
    }
  }
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30)) {
    out[n]++;
    return;
  }
  Z d = small_factor(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<Z> divisors(const Z& n) {
  std::map<Z, int> f;
  factor_into(n, f);
  std::vector<Z> ds{1};
  for (auto& [p, k] : f) {
    std::size_t cur = ds.size();
    Z pk = 1;
    for (int i = 1; i <= k; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < cur; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

namespace {

// integer coefficients, content removed
std::vector<Z> integerize(const UPoly& p) {
  Z l = 1;
  for (auto& x : p.c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<Z> r;
  Z g = 0;
  for (auto& x : p.c) {
    Z v = x.get_num() * (l / x.get_den());
    r.push_back(v);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g > 1)
    for (auto& v : r) v /= g;
  return r;
}

bool deflate(UPoly& p, const Q& root) {
  UPoly q, r;
  divmod(p, UPoly::linear(1, -root), &q, &r);
  if (!r.is_zero()) return false;
  p = q;
  return true;
}

}  // namespace

std::vector<std::pair<Q, int>> rational_roots(const UPoly& p0) {
  if (p0.is_zero()) throw ZeroPolynomial();
  std::vector<std::pair<Q, int>> out;
  UPoly p = p0;
  int zmult = 0;
  while (!p.is_zero() && p.c[0] == 0) {
    p.c.erase(p.c.begin());
    ++zmult;
  }
  if (zmult) out.push_back({Q(0), zmult});
  if (p.deg() >= 1) {
    auto z = integerize(p);
    Z a0 = abs(z.front()), an = abs(z.back());
    // Cauchy bound
    Q bound = 0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      Q r(abs(z[i]), an);
      r.canonicalize();
      if (r > bound) bound = r;
    }
    bound += 1;
    std::vector<Z> dp = divisors(a0), dq = divisors(an);
    std::vector<Q> cands;
    for (auto& a : dp)
      for (auto& b : dq) {
        Q c(a, b);
        c.canonicalize();
        if (c > bound) continue;
        cands.push_back(c);
        cands.push_back(-c);
      }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (auto& c : cands) {
      if (p.deg() < 1) break;
      int m = 0;
      while (p.deg() >= 1 && deflate(p, c)) ++m;
      if (m) out.push_back({c, m});
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return out;
}

std::vector<long> nonneg_integer_roots(const UPoly& p) {
  if (p.is_zero()) throw ZeroPolynomial();
  std::vector<long> out;
  UPoly q = p;
  if (q.deg() < 1) return out;
  if (q.c[0] == 0) out.push_back(0);
  while (!q.is_zero() && q.c[0] == 0) q.c.erase(q.c.begin());
  if (q.deg() < 1) return out;
  auto z = integerize(q);
  Z a0 = abs(z.front());
  Q bound = 0;
  Z an = abs(z.back());
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    Q r(abs(z[i]), an);
    r.canonicalize();
    if (r > bound) bound = r;
  }
  bound += 1;
  for (auto& d : divisors(a0)) {
    if (Q(d) > bound) break;
    if (q.eval(Q(d)) == 0) out.push_back(d.get_si());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long> nonneg_integer_roots(const Poly& p) {
  if (p.is_zero()) throw ZeroPolynomial();
  return nonneg_integer_roots(to_upoly(p, NV));
}

long max_nonneg_root(const Poly& p) {
  if (p.is_zero()) throw ZeroPolynomial();
  if (p.is_const()) return -1;
  auto r = nonneg_integer_roots(p);
  return r.empty() ? -1 : r.back();
}

LinearFactorization factor_linear(const UPoly& p) {
  if (p.is_zero()) throw ZeroPolynomial();
  LinearFactorization f;
  f.lc = p.lc();
  UPoly rest = p.monic();
  f.roots = rational_roots(rest);
  for (auto& [r, m] : f.roots)
    for (int i = 0; i < m; ++i) deflate(rest, r);
  f.rest = rest.monic();
  return f;
}

}  // namespace nestsolve
