#pragma once
#include <string>
#include <vector>

#include "nestsolve/poly.hpp"

namespace nestsolve {

// Reduced quotient of polynomials; the denominator is monic under the term order.
class RatFun {
 public:
  RatFun() : num_(), den_(Q(1)) {}
  RatFun(const Q& c) : num_(c), den_(Q(1)) {}
  RatFun(long c) : RatFun(Q(c)) {}
  RatFun(const Poly& p) : num_(p), den_(Q(1)) {}
  RatFun(const Poly& num, const Poly& den);
  static RatFun var(Var v) { return RatFun(Poly::var(v)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_const() const { return num_.is_const() && den_.is_const(); }
  bool is_poly() const { return den_.is_const(); }
  Q const_value() const;
  unsigned mask() const { return num_.mask() | den_.mask(); }
  bool has(Var v) const { return (mask() >> v) & 1u; }

  RatFun operator-() const;
  friend RatFun operator+(const RatFun& a, const RatFun& b);
  friend RatFun operator-(const RatFun& a, const RatFun& b);
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  friend RatFun operator/(const RatFun& a, const RatFun& b);
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
  RatFun& operator/=(const RatFun& o) { return *this = *this / o; }
  bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFun& o) const { return !(*this == o); }
  RatFun pow(long k) const;

  RatFun shift_N(long k) const { return shift(NV, k); }
  RatFun shift(Var v, long k) const;
  RatFun subst(Var v, const Q& val) const;
  RatFun subst(Var v, const RatFun& val) const;
  Q eval_N(long n) const;
  Q eval_N(const Q& n) const;
  Q eval(const Q& eps, const Q& x, const Q& n) const;
  RatFun eval_eps_zero() const;

  // lowest eps power: val(num) - val(den)
  int eps_valuation() const;
  // coefficients c_0..c_{count-1} with f = eps^val * sum c_i eps^i
  std::vector<RatFun> eps_series(int count, int* val) const;

  // 1 + largest non-negative integer root of den (in N), 0 if none
  long pole_threshold() const;

  std::string str(const std::string& nname = "N") const;
  // this = k * ns / ds with ns, ds products of factors (empty when constant)
  void factored_parts(const std::string& nname, Q* k, std::string* ns, std::string* ds) const;
  int compare(const RatFun& o) const;

 private:
  struct Raw {};
  RatFun(Poly num, Poly den, Raw) : num_(std::move(num)), den_(std::move(den)) {}
  Poly num_, den_;
};

RatFun falling_factorial(const RatFun& y, int k);

}  // namespace nestsolve
