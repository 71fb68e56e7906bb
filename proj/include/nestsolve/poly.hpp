#pragma once
#include <array>
#include <string>
#include <vector>

#include "nestsolve/rational.hpp"

namespace nestsolve {

enum Var : int { EPS = 0, X = 1, NV = 2 };
constexpr int kVars = 3;

using Exp = std::array<int, kVars>;

struct Term {
  Exp e;
  Q c;
};

// graded lexicographic, eps < x < N; true if a precedes b (a is larger)
bool term_greater(const Exp& a, const Exp& b);

// Multivariate polynomial over Q in eps, x, N. Terms sorted from the leading term down.
class Poly {
 public:
  Poly() = default;
  Poly(const Q& c);
  Poly(long c) : Poly(Q(c)) {}
  static Poly var(Var v);
  static Poly monomial(const Exp& e, const Q& c);
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_const() const;
  Q const_value() const;
  const Term& lead() const { return t_.front(); }
  int deg(Var v) const;
  int low_deg(Var v) const;
  int total_deg() const;
  unsigned mask() const;
  bool has(Var v) const { return (mask() >> v) & 1u; }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Q& c);
  friend Poly operator*(const Q& c, const Poly& a) { return a * c; }
  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }
  Poly pow(unsigned k) const;

  Poly shift(Var v, const Q& k) const;
  Poly subst(Var v, const Q& val) const;
  Poly subst(Var v, const Poly& val) const;
  Q eval(const Q& eps, const Q& x, const Q& n) const;
  Q eval_N(const Q& n) const;
  std::vector<Poly> coeffs(Var v) const;
  static Poly from_coeffs(const std::vector<Poly>& c, Var v);
  Poly mul_var(Var v, int k) const;

  // scalar c with p/c having coprime integer coefficients and positive leading coefficient
  Q scalar_content() const;
  Poly monic() const;

  std::string str(const std::string& nname = "N") const;
  int compare(const Poly& o) const;

 private:
  std::vector<Term> t_;
};

// throws Error if b does not divide a
Poly exact_div(const Poly& a, const Poly& b);
bool try_div(const Poly& a, const Poly& b, Poly* q);
Poly gcd(const Poly& a, const Poly& b);
Poly lcm(const Poly& a, const Poly& b);
Poly content(const Poly& p, Var v);

const char* var_name(Var v);

}  // namespace nestsolve
