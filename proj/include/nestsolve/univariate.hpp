#pragma once
#include <utility>
#include <vector>

#include "nestsolve/poly.hpp"

namespace nestsolve {

// Dense univariate polynomial over Q, c[i] is the coefficient of t^i.
struct UPoly {
  std::vector<Q> c;

  UPoly() = default;
  explicit UPoly(std::vector<Q> v) : c(std::move(v)) { trim(); }
  static UPoly constant(const Q& a) { return UPoly({a}); }
  static UPoly linear(const Q& a, const Q& b) { return UPoly({b, a}); }  // a*t+b

  void trim();
  bool is_zero() const { return c.empty(); }
  int deg() const { return static_cast<int>(c.size()) - 1; }
  const Q& lc() const { return c.back(); }
  Q eval(const Q& t) const;
  UPoly operator+(const UPoly& o) const;
  UPoly operator-(const UPoly& o) const;
  UPoly operator*(const UPoly& o) const;
  UPoly operator*(const Q& a) const;
  bool operator==(const UPoly& o) const { return c == o.c; }
  UPoly taylor_shift(const Q& a) const;  // p(t+a)
  UPoly monic() const;
  UPoly pow(unsigned k) const;
};

void divmod(const UPoly& a, const UPoly& b, UPoly* q, UPoly* r);
UPoly gcd(const UPoly& a, const UPoly& b);

UPoly to_upoly(const Poly& p, Var v);
Poly from_upoly(const UPoly& p, Var v);

// rational roots with multiplicity, ascending
std::vector<std::pair<Q, int>> rational_roots(const UPoly& p);
std::vector<long> nonneg_integer_roots(const UPoly& p);
std::vector<long> nonneg_integer_roots(const Poly& p);
// largest non-negative integer root, -1 if none
long max_nonneg_root(const Poly& p);

// p = lc * prod (t - root)^mult * rest, rest monic without rational roots
struct LinearFactorization {
  Q lc;
  std::vector<std::pair<Q, int>> roots;
  UPoly rest;
};
LinearFactorization factor_linear(const UPoly& p);

std::vector<Z> divisors(const Z& n);

}  // namespace nestsolve
