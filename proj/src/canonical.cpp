#include "nestsolve/canonical.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "nestsolve/errors.hpp"
#include "nestsolve/linalg.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

namespace {

int cmp_q(const Q& a, const Q& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int cmp_word(const Word& a, const Word& b) {
  if (word_less(a, b)) return -1;
  if (word_less(b, a)) return 1;
  return 0;
}

int cmp_prod(const std::vector<ProdFactor>& a, const std::vector<ProdFactor>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = cmp_q(a[i].alpha, b[i].alpha)) return c;
    if (a[i].e != b[i].e) return a[i].e < b[i].e ? -1 : 1;
  }
  return 0;
}

RatFun Nvar() { return RatFun::var(NV); }

Q floor_q(const Q& q) {
  Z f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Q(f);
}

// P_alpha(m) for any integer m (negative m by the backward recurrence)
Q p_alpha_value(const Q& alpha, long m) {
  Q r = 1;
  if (m >= 0) {
    for (long j = 1; j <= m; ++j) r *= Q(j) + alpha;
    return r;
  }
  for (long j = m + 1; j <= 0; ++j) r *= Q(j) + alpha;
  if (r == 0) throw DivisionByZero();
  return 1 / r;
}

// P_alpha(N+t) / P_alpha(N)
RatFun p_alpha_ratio(const Q& alpha, long t) {
  RatFun r(1);
  if (t >= 0) {
    for (long j = 1; j <= t; ++j) r *= Nvar() + RatFun(Q(j) + alpha);
    return r;
  }
  for (long j = t + 1; j <= 0; ++j) r *= Nvar() + RatFun(Q(j) + alpha);
  return RatFun(1) / r;
}

std::vector<ProdFactor> merge_prod(const std::vector<ProdFactor>& a, const std::vector<ProdFactor>& b) {
  std::map<Q, int> m;
  for (auto& f : a) m[f.alpha] += f.e;
  for (auto& f : b) m[f.alpha] += f.e;
  std::vector<ProdFactor> out;
  for (auto& [al, e] : m)
    if (e != 0) out.push_back({al, e});
  return out;
}

bool n_only(const RatFun& f) { return (f.mask() & ~(1u << NV)) == 0; }

std::mutex g_memo_mutex;

}  // namespace

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  if (int c = cmp_word(a.word, b.word)) return c < 0;
  bool a1 = a.z == 1, b1 = b.z == 1;
  if (a1 != b1) return a1;
  if (int c = cmp_q(a.z, b.z)) return c < 0;
  return cmp_prod(a.prod, b.prod) < 0;
}

CanonicalForm CanonicalForm::rational(const RatFun& f) { return monomial(Monomial{}, f); }

CanonicalForm CanonicalForm::harmonic(const Word& w) {
  Monomial m;
  m.word = w;
  return monomial(m, RatFun(1));
}

CanonicalForm CanonicalForm::monomial(const Monomial& m, const RatFun& c) {
  CanonicalForm f;
  f.add_term(m, c);
  return f;
}

void CanonicalForm::add_term(const Monomial& m, const RatFun& c) {
  if (c.is_zero()) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) t_.erase(it);
}

bool CanonicalForm::is_rational() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }

RatFun CanonicalForm::rational_part() const {
  auto it = t_.find(Monomial{});
  return it == t_.end() ? RatFun() : it->second;
}

CanonicalForm CanonicalForm::operator-() const { return scale(RatFun(-1)); }

CanonicalForm& CanonicalForm::operator+=(const CanonicalForm& o) {
  for (auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

CanonicalForm operator+(const CanonicalForm& a, const CanonicalForm& b) {
  CanonicalForm r = a;
  r += b;
  return r;
}

CanonicalForm operator-(const CanonicalForm& a, const CanonicalForm& b) { return a + (-b); }

CanonicalForm CanonicalForm::scale(const RatFun& c) const {
  CanonicalForm r;
  if (c.is_zero()) return r;
  for (auto& [m, v] : t_) r.t_.emplace(m, v * c);
  return r;
}

std::map<Word, Q> quasi_shuffle(const Word& u, const Word& v) {
  if (u.empty()) return {{v, Q(1)}};
  if (v.empty()) return {{u, Q(1)}};
  static std::map<std::pair<Word, Word>, std::map<Word, Q>> memo;
  auto key = std::make_pair(u, v);
  {
    std::lock_guard<std::mutex> g(g_memo_mutex);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  std::map<Word, Q> out;
  auto acc = [&](const Letter& head, const std::map<Word, Q>& part, const Q& sign) {
    for (auto& [w, c] : part) {
      Word nw;
      nw.reserve(w.size() + 1);
      nw.push_back(head);
      nw.insert(nw.end(), w.begin(), w.end());
      Q& slot = out[nw];
      slot += sign * c;
      if (slot == 0) out.erase(nw);
    }
  };
  Word u1(u.begin() + 1, u.end()), v1(v.begin() + 1, v.end());
  acc(u[0], quasi_shuffle(u1, v), 1);
  acc(v[0], quasi_shuffle(u, v1), 1);
  acc(Letter{u[0].m + v[0].m, u[0].x * v[0].x}, quasi_shuffle(u1, v1), -1);
  std::lock_guard<std::mutex> g(g_memo_mutex);
  memo.emplace(key, out);
  return out;
}

CanonicalForm quasi_shuffle_product(const Word& u, const Word& v) {
  CanonicalForm r;
  for (auto& [w, c] : quasi_shuffle(u, v)) r += CanonicalForm::harmonic(w).scale(RatFun(c));
  return r;
}

CanonicalForm operator*(const CanonicalForm& a, const CanonicalForm& b) {
  CanonicalForm r;
  for (auto& [ma, ca] : a.t_)
    for (auto& [mb, cb] : b.t_) {
      Monomial m;
      m.z = ma.z * mb.z;
      m.prod = merge_prod(ma.prod, mb.prod);
      RatFun c = ca * cb;
      for (auto& [w, q] : quasi_shuffle(ma.word, mb.word)) {
        m.word = w;
        r.add_term(m, c * RatFun(q));
      }
    }
  return r;
}

CanonicalForm shift_word(const Word& w, long s) {
  if (s == 0 || w.empty()) return CanonicalForm::harmonic(w);
  static std::map<std::pair<Word, long>, CanonicalForm> memo;
  auto key = std::make_pair(w, s);
  {
    std::lock_guard<std::mutex> g(g_memo_mutex);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  const Letter& L = w[0];
  Word rest(w.begin() + 1, w.end());
  Monomial zm;
  zm.z = L.x;
  CanonicalForm res = CanonicalForm::harmonic(w);
  if (s > 0) {
    for (long j = 1; j <= s; ++j) {
      RatFun c = RatFun(qpow(L.x, j)) / (Nvar() + RatFun(j)).pow(L.m);
      res += shift_word(rest, j) * CanonicalForm::monomial(zm, c);
    }
  } else {
    for (long j = 0; j < -s; ++j) {
      RatFun c = RatFun(qpow(L.x, -j)) / (Nvar() - RatFun(j)).pow(L.m);
      res += -(shift_word(rest, -j) * CanonicalForm::monomial(zm, c));
    }
  }
  std::lock_guard<std::mutex> g(g_memo_mutex);
  memo.emplace(key, res);
  return res;
}

CanonicalForm CanonicalForm::shift(long s) const {
  if (s == 0) return *this;
  CanonicalForm r;
  for (auto& [m, c] : t_) {
    RatFun coef = c.shift_N(s) * RatFun(qpow(m.z, s));
    for (auto& f : m.prod) coef *= p_alpha_ratio(f.alpha, s).pow(f.e);
    Monomial base{m.z, m.prod, {}};
    if (m.word.empty()) {
      r.add_term(base, coef);
      continue;
    }
    for (auto& [m2, c2] : shift_word(m.word, s).t_) {
      Monomial mm = base;
      mm.z *= m2.z;
      mm.word = m2.word;
      r.add_term(mm, coef * c2);
    }
  }
  return r;
}

std::vector<Q> CanonicalForm::evaluate_range(long lo, long hi) const {
  if (lo < 0) throw Error("evaluation at negative index");
  if (hi < lo) return {};
  std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Q> out(len, Q(0));
  std::map<Word, std::vector<Q>> hcache;
  for (auto& [m, c] : t_) {
    std::vector<Q> v(len);
    for (long n = lo; n <= hi; ++n) v[n - lo] = c.eval_N(n);
    if (m.z != 1) {
      Q zp = qpow(m.z, lo);
      for (std::size_t i = 0; i < len; ++i) {
        v[i] *= zp;
        zp *= m.z;
      }
    }
    for (auto& f : m.prod) {
      Q p = p_alpha_value(f.alpha, lo);
      for (long n = lo; n <= hi; ++n) {
        if (n > lo) p *= Q(n) + f.alpha;
        v[n - lo] *= qpow(p, f.e);
      }
    }
    if (!m.word.empty()) {
      auto it = hcache.find(m.word);
      if (it == hcache.end()) it = hcache.emplace(m.word, harmonic_values(m.word, hi)).first;
      for (long n = lo; n <= hi; ++n) v[n - lo] *= it->second[n];
    }
    for (std::size_t i = 0; i < len; ++i) out[i] += v[i];
  }
  return out;
}

long CanonicalForm::valid_from() const {
  long v = 0;
  for (auto& [m, c] : t_) v = std::max(v, c.pole_threshold());
  return v;
}

Expr CanonicalForm::to_expr() const {
  std::vector<Expr> parts;
  for (auto& [m, c] : t_) {
    std::vector<Expr> fs{Expr::rat(c)};
    if (m.z != 1) fs.push_back(Expr::geometric(m.z));
    if (!m.prod.empty()) {
      RatFun q(1);
      for (auto& f : m.prod) q *= (Nvar() + RatFun(f.alpha)).pow(f.e);
      fs.push_back(Expr::prod(1, q));
    }
    if (!m.word.empty()) fs.push_back(Expr::harmonic(m.word));
    parts.push_back(Expr::mul(fs));
  }
  return Expr::add(parts);
}

namespace {

// g(N)/g(N-h) factors between the non-linear parts; their product over k=l..N is rational
bool strip_telescoping(long l, RatFun* q, RatFun* closed) {
  for (int guard = 0; guard < 16; ++guard) {
    UPoly rn = factor_linear(to_upoly(q->num(), NV)).rest;
    UPoly rd = factor_linear(to_upoly(q->den(), NV)).rest;
    if (rn.deg() <= 0 && rd.deg() <= 0) return true;
    bool found = false;
    for (long h = 1; h <= 64 && !found; ++h)
      for (int side = 0; side < 2 && !found; ++side) {
        const UPoly& a = side ? rd : rn;
        const UPoly& b = side ? rn : rd;
        UPoly g = gcd(a, b.taylor_shift(Q(h)));
        if (g.deg() <= 0) continue;
        RatFun gn(from_upoly(g, NV));
        RatFun ratio = gn / gn.shift_N(-h);
        RatFun part(1);
        for (long i = 0; i < h; ++i) part *= gn.shift_N(-i) / RatFun(gn.eval_N(Q(l - 1 - i)));
        if (side) {
          *q *= ratio;
          *closed /= part;
        } else {
          *q /= ratio;
          *closed *= part;
        }
        found = true;
      }
    if (!found) return false;
  }
  return false;
}

}  // namespace

std::optional<CanonicalForm> canonical_hyperproduct(long l, const RatFun& q0) {
  if (!n_only(q0) || q0.is_zero()) return std::nullopt;
  RatFun q = q0, closed(1);
  if (!strip_telescoping(l, &q, &closed)) return std::nullopt;
  if (closed != RatFun(1)) {
    auto rest = canonical_hyperproduct(l, q);
    if (!rest) return std::nullopt;
    return rest->scale(closed);
  }
  auto fn = factor_linear(to_upoly(q.num(), NV));
  auto fd = factor_linear(to_upoly(q.den(), NV));
  if (fn.rest.deg() > 0 || fd.rest.deg() > 0) return std::nullopt;
  Q c = fn.lc / fd.lc;
  std::map<Q, int> ex;
  for (auto& [rho, m] : fn.roots) ex[-rho] += m;
  for (auto& [rho, m] : fd.roots) ex[-rho] -= m;
  Monomial mono;
  mono.z = c;
  RatFun coef(qpow(c, 1 - l));
  std::map<Q, int> pe;
  for (auto& [beta, e] : ex) {
    if (e == 0) continue;
    if (is_integer(beta) && -beta >= l) return std::nullopt;
    Q t = floor_q(beta);
    Q alpha = beta - t;
    long ti = t.get_num().get_si();
    coef *= (p_alpha_ratio(alpha, ti) / RatFun(p_alpha_value(alpha, l + ti - 1))).pow(e);
    pe[alpha] += e;
  }
  for (auto& [al, e] : pe)
    if (e != 0) mono.prod.push_back({al, e});
  return CanonicalForm::monomial(mono, coef);
}

namespace {

struct PartialFractions {
  UPoly poly;
  std::vector<std::tuple<long, int, Q>> poles;  // A / (k+a)^j
};

std::optional<PartialFractions> partial_fractions(const RatFun& c) {
  UPoly num = to_upoly(c.num(), NV), den = to_upoly(c.den(), NV);
  PartialFractions pf;
  UPoly rem;
  divmod(num, den, &pf.poly, &rem);
  if (rem.is_zero()) return pf;
  auto fl = factor_linear(den);
  if (fl.rest.deg() > 0) return std::nullopt;
  for (auto& [rho, e] : fl.roots) {
    if (!is_integer(rho) || rho > 0) return std::nullopt;
    UPoly dr = den, q, r;
    UPoly lin = UPoly::linear(1, -rho);
    for (int i = 0; i < e; ++i) {
      divmod(dr, lin, &q, &r);
      dr = q;
    }
    UPoly rs = rem.taylor_shift(rho), ds = dr.taylor_shift(rho);
    std::vector<Q> g(e);
    for (int i = 0; i < e; ++i) {
      Q acc = i < static_cast<int>(rs.c.size()) ? rs.c[i] : Q(0);
      for (int k = 1; k <= i; ++k)
        if (k < static_cast<int>(ds.c.size())) acc -= ds.c[k] * g[i - k];
      g[i] = acc / ds.c[0];
    }
    long a = -rho.get_num().get_si();
    for (int j = 1; j <= e; ++j)
      if (g[e - j] != 0) pf.poles.emplace_back(a, j, g[e - j]);
  }
  return pf;
}

// F with F(N) - F(N-1) = P(N) z^N and F(0) = 0
CanonicalForm indefinite_geometric(const UPoly& p, const Q& z) {
  if (p.is_zero()) return {};
  int d = p.deg();
  int nu = d + 1;
  Matrix<Q> m(d + 1, std::vector<Q>(nu, Q(0)));
  std::vector<Q> rhs(d + 1);
  for (int i = 0; i <= d; ++i) rhs[i] = p.c[i];
  for (int col = 0; col < nu; ++col) {
    int power = z == 1 ? col + 1 : col;
    std::vector<Q> mono(power + 1, Q(0));
    mono[power] = 1;
    UPoly t(mono);
    UPoly back = t.taylor_shift(-1);
    UPoly diff = z == 1 ? t - back : t - back * (1 / z);
    for (int i = 0; i <= d && i < static_cast<int>(diff.c.size()); ++i) m[i][col] = diff.c[i];
  }
  auto sol = solve_linear(m, rhs, nu);
  if (!sol) throw Error("indefinite summation failed");
  std::vector<Q> coeffs(nu + 1, Q(0));
  for (int col = 0; col < nu; ++col) coeffs[z == 1 ? col + 1 : col] = (*sol)[col];
  RatFun qpoly(from_upoly(UPoly(coeffs), NV));
  if (z == 1) return CanonicalForm::rational(qpoly);
  Monomial zm;
  zm.z = z;
  return CanonicalForm::monomial(zm, qpoly) - CanonicalForm::rational(RatFun(qpoly.eval_N(0)));
}

UPoly derivative(const UPoly& p) {
  std::vector<Q> c;
  for (std::size_t i = 1; i < p.c.size(); ++i) c.push_back(p.c[i] * Q(static_cast<long>(i)));
  return UPoly(c);
}

UPoly quo(const UPoly& a, const UPoly& b) {
  UPoly q, r;
  divmod(a, b, &q, &r);
  return q;
}

UPoly rem(const UPoly& a, const UPoly& b) {
  UPoly q, r;
  divmod(a, b, &q, &r);
  return r;
}

// s*a + t*b = gcd(a, b), gcd monic
void ext_gcd(const UPoly& a, const UPoly& b, UPoly* s, UPoly* t) {
  UPoly r0 = a, r1 = b, s0 = UPoly::constant(1), s1, t0, t1 = UPoly::constant(1);
  while (!r1.is_zero()) {
    UPoly q, r;
    divmod(r0, r1, &q, &r);
    r0 = r1;
    r1 = r;
    UPoly ns = s0 - q * s1, nt = t0 - q * t1;
    s0 = s1;
    s1 = ns;
    t0 = t1;
    t1 = nt;
  }
  Q inv = 1 / r0.lc();
  *s = s0 * inv;
  *t = t0 * inv;
}

// Yun: f = prod a_i^i
std::vector<std::pair<UPoly, int>> squarefree(const UPoly& f) {
  std::vector<std::pair<UPoly, int>> out;
  if (f.deg() <= 0) return out;
  UPoly fm = f.monic(), d1 = derivative(fm);
  UPoly a0 = gcd(fm, d1);
  UPoly b = quo(fm, a0), c = quo(d1, a0);
  UPoly d = c - derivative(b);
  for (int i = 1; b.deg() > 0; ++i) {
    UPoly a = gcd(b, d);
    if (a.deg() > 0) out.push_back({a.monic(), i});
    b = quo(b, a);
    c = quo(d, a);
    d = c - derivative(b);
  }
  return out;
}

constexpr long kMaxDispersion = 64;

// split atoms until any two are either shift-equivalent or coprime under all shifts
void refine_by_shifts(std::vector<std::pair<UPoly, int>>& atoms) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < atoms.size() && !changed; ++i)
      for (std::size_t j = 0; j < atoms.size() && !changed; ++j)
        for (long h = -kMaxDispersion; h <= kMaxDispersion && !changed; ++h) {
          if (i == j && h == 0) continue;
          UPoly a = atoms[i].first, b = atoms[j].first;
          UPoly g = gcd(a, b.taylor_shift(Q(h)));
          if (g.deg() <= 0) continue;
          g = g.monic();
          if (g.deg() < a.deg()) {
            atoms[i].first = quo(a, g).monic();
            atoms.push_back({g, atoms[i].second});
            changed = true;
          } else if (b.deg() > a.deg()) {
            UPoly g2 = g.taylor_shift(Q(-h)).monic();
            atoms[j].first = quo(b, g2).monic();
            atoms.push_back({g2, atoms[j].second});
            changed = true;
          }
        }
  }
}

// c = z*G(k+1) - G(k) + rest, rest without poles off the integers
bool shift_reduce(const RatFun& c, const Q& z, RatFun* G, RatFun* rest) {
  *G = RatFun();
  UPoly num = to_upoly(c.num(), NV), den = to_upoly(c.den(), NV);
  auto fl = factor_linear(den);
  UPoly good = UPoly::constant(1);
  std::vector<std::pair<UPoly, int>> atoms;
  for (auto& [rho, e] : fl.roots) {
    UPoly lin = UPoly::linear(1, -rho);
    if (is_integer(rho))
      good = good * lin.pow(e);
    else
      atoms.push_back({lin, e});
  }
  if (atoms.empty() && fl.rest.deg() <= 0) {
    *rest = c;
    return true;
  }
  for (auto& a : squarefree(fl.rest)) atoms.push_back(a);
  refine_by_shifts(atoms);
  UPoly bad = UPoly::constant(1);
  for (auto& [a, e] : atoms) bad = bad * a.pow(e);

  UPoly q, r;
  divmod(num, den, &q, &r);
  r = r * (1 / fl.lc);
  UPoly sg, tb;
  ext_gcd(good, bad, &sg, &tb);
  UPoly rb = rem(r * sg, bad), rg = rem(r * tb, good);
  RatFun goodpart = RatFun(from_upoly(q, NV)) + RatFun(from_upoly(rg, NV)) / RatFun(from_upoly(good, NV));

  std::vector<int> rep(atoms.size(), -1);
  std::vector<long> off(atoms.size(), 0);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t k = 0; k <= i && rep[i] < 0; ++k)
      for (long h = -kMaxDispersion; h <= kMaxDispersion; ++h)
        if (atoms[i].first == atoms[k].first.taylor_shift(Q(h)) && (k == i || rep[k] == static_cast<int>(k))) {
          rep[i] = static_cast<int>(k);
          off[i] = h;
          break;
        }

  std::map<int, RatFun> residual;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto& [a, e] = atoms[i];
    UPoly P = a.pow(e);
    UPoly si, ti;
    ext_gcd(quo(bad, P), P, &si, &ti);
    UPoly Ni = rem(rb * si, P);
    RatFun ar(from_upoly(a, NV));
    for (int idx = 0; idx < e && !Ni.is_zero(); ++idx) {
      UPoly qa, A;
      divmod(Ni, a, &qa, &A);
      Ni = qa;
      if (A.is_zero()) continue;
      RatFun t = RatFun(from_upoly(A, NV)) / ar.pow(e - idx);
      // a(k) = a_rep(k+h): move the pole h steps
      for (long h = off[i]; h > 0; --h) {
        t = t.shift_N(-1) / RatFun(z);
        *G += t;
      }
      for (long h = off[i]; h < 0; ++h) {
        *G -= t;
        t = RatFun(z) * t.shift_N(1);
      }
      residual[rep[i]] += t;
    }
  }
  for (auto& [k, t] : residual)
    if (!t.is_zero()) return false;
  *rest = goodpart;
  return true;
}

std::optional<CanonicalForm> sum_from_1(const CanonicalForm& f);

// sum_{k=1}^N z^k/(k+a)^j S_w(k)
std::optional<CanonicalForm> pole_sum(long a, int j, const Q& z, const Word& w) {
  Word W;
  W.push_back({j, z});
  W.insert(W.end(), w.begin(), w.end());
  if (a == 0) return CanonicalForm::harmonic(W);
  Q sw_a = harmonic_values(W, a)[a];
  CanonicalForm first = (shift_word(W, a) - CanonicalForm::rational(RatFun(sw_a))).scale(RatFun(qpow(z, -a)));
  CanonicalForm diff = shift_word(w, a) - CanonicalForm::harmonic(w);
  Monomial zm;
  zm.z = z;
  auto second = sum_from_1(diff * CanonicalForm::monomial(zm, RatFun(1) / (Nvar() + RatFun(a)).pow(j)));
  if (!second) return std::nullopt;
  return first - *second;
}

std::optional<CanonicalForm> sum_from_1(const CanonicalForm& f) {
  std::map<Monomial, RatFun, MonomialLess> work(f.terms().begin(), f.terms().end());
  CanonicalForm out;
  while (!work.empty()) {
    // deepest words first: summation by parts feeds shallower ones
    auto it = std::max_element(work.begin(), work.end(),
                               [](const auto& a, const auto& b) { return a.first.word.size() < b.first.word.size(); });
    Monomial m = it->first;
    RatFun c = it->second;
    work.erase(it);
    if (c.is_zero()) continue;
    if (!m.prod.empty() || !n_only(c)) return std::nullopt;
    RatFun G, rest;
    if (!shift_reduce(c, m.z, &G, &rest)) return std::nullopt;
    if (!G.is_zero()) {
      // z^k (z G(k+1) - G(k)) S_w(k)
      out += CanonicalForm::monomial(m, RatFun(m.z) * G.shift_N(1));
      if (m.word.empty()) {
        out += CanonicalForm::rational(RatFun(-m.z * G.eval_N(Q(1))));
      } else {
        const Letter& L = m.word[0];
        Monomial lm;
        lm.z = m.z * L.x;
        lm.word.assign(m.word.begin() + 1, m.word.end());
        work[lm] = work[lm] - G / Nvar().pow(L.m);
      }
    }
    if (rest.is_zero()) continue;
    auto pf = partial_fractions(rest);
    if (!pf) return std::nullopt;
    for (auto& [a, j, A] : pf->poles) {
      auto s = pole_sum(a, j, m.z, m.word);
      if (!s) return std::nullopt;
      out += s->scale(RatFun(A));
    }
    if (pf->poly.is_zero()) continue;
    CanonicalForm F = indefinite_geometric(pf->poly, m.z);
    if (m.word.empty()) {
      out += F;
      continue;
    }
    // summation by parts
    const Letter& L = m.word[0];
    Word rest_w(m.word.begin() + 1, m.word.end());
    Monomial lm;
    lm.z = L.x;
    lm.word = rest_w;
    auto inner = sum_from_1(F.shift(-1) * CanonicalForm::monomial(lm, RatFun(1) / Nvar().pow(L.m)));
    if (!inner) return std::nullopt;
    out += F * CanonicalForm::harmonic(m.word) - *inner;
  }
  return out;
}

}  // namespace

std::optional<CanonicalForm> sum_from(long l, const CanonicalForm& f) {
  if (l == 1) return sum_from_1(f);
  auto g = sum_from_1(f.shift(l - 1));
  if (!g) return std::nullopt;
  return g->shift(-(l - 1));
}

std::optional<CanonicalForm> canonicalize(const Expr& e) {
  switch (e.kind()) {
    case Kind::Rat:
      if (!n_only(e.rf())) return std::nullopt;
      return CanonicalForm::rational(e.rf());
    case Kind::Add:
    case Kind::Mul: {
      bool add = e.kind() == Kind::Add;
      CanonicalForm acc = add ? CanonicalForm() : CanonicalForm::rational(RatFun(1));
      for (auto& k : e.kids()) {
        auto f = canonicalize(k);
        if (!f) return std::nullopt;
        acc = add ? acc + *f : acc * *f;
      }
      return acc;
    }
    case Kind::Prod: return canonical_hyperproduct(e.lower(), e.rf());
    case Kind::Sum: {
      auto f = canonicalize(e.kids()[0]);
      if (!f) return std::nullopt;
      return sum_from(e.lower(), *f);
    }
    case Kind::Harmonic: return CanonicalForm::harmonic(e.word());
  }
  return std::nullopt;
}

std::optional<Word> detect_harmonic(const Expr& e) {
  auto f = canonicalize(e);
  if (!f || f->terms().size() != 1) return std::nullopt;
  auto& [m, c] = *f->terms().begin();
  if (c != RatFun(1) || m.z != 1 || !m.prod.empty() || m.word.empty()) return std::nullopt;
  return m.word;
}

}  // namespace nestsolve
