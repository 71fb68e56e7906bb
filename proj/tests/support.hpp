#pragma once
#include <random>
#include <string>
#include <vector>

#include "nestsolve/canonical.hpp"
#include "nestsolve/laurent.hpp"
#include "nestsolve/operator.hpp"
#include "nestsolve/sum_expr.hpp"

namespace nestsolve::testing {

inline RatFun rf(const std::string& s) { return parse_ratfun(s); }
inline Sequence seq(const std::string& s) { return Sequence::from_expr(parse_expr(s)); }
inline Expr ex(const std::string& s) { return parse_expr(s); }

inline Q qq(long a, long b) {
  Q q(a, b);
  q.canonicalize();
  return q;
}

inline OpCoeffs ops(std::initializer_list<const char*> cs) {
  OpCoeffs a;
  for (auto c : cs) a.push_back(rf(c));
  return a;
}

// printed examples shared by several suites
inline OpCoeffs simple_rec_op() {
  return ops({"-2*(N+1)*(N+2)^2", "-(N+2)*(-6*N^2-28*N-32)", "-6*N^3-50*N^2-136*N-120", "-(-N-2)*(N+4)*(2*N+8)"});
}
inline const char* simple_rec_rhs() { return "-4*(N+2)/(3*(N+3))"; }
inline const char* simple_rec_solution() { return "(59*N^2+120*N+49)/(9*(N+1)^2) - 2*(N+3)*S[1](N)/(3*(N+1))"; }

inline OpCoeffs eps_rec_op() {
  return ops({"-2*(N+1)*(N+2)*(2+eps+N)", "-(N+2)*(-32-7*eps+2*eps^2-28*N-5*eps*N-6*N^2)",
              "-(120+3*eps-14*eps^2-eps^3+136*N+13*eps*N-4*eps^2*N+50*N^2+4*eps*N^2+6*N^3)",
              "(2-eps+N)*(4+eps+N)*(8+eps+2*N)"});
}
inline LaurentExpansion eps_rec_rhs() {
  return {-3,
          {seq("-4*(N+2)/(3*(N+3))"),
           seq("-2*(2*N+7)*S[1](N)/(3*(N+3)) - 2*(4*N^4+35*N^3+101*N^2+105*N+25)/(3*(N+1)*(N+2)*(N+3)^2)")}};
}
inline const char* printed_c_minus2() {
  return "-2*(20*N^3+58*N^2+57*N+22)/(3*(N+1)^3) + 2*(N+2)*(2*N-1)*S[1](N)/(3*(N+1)^2) - S[1](N)^2/(N+1) - "
         "S[2](N)/(N+1)";
}

// printed expansions of the coupled system, orders -3 and -2
inline std::vector<std::vector<std::string>> printed_coupled() {
  return {{"4*(3*N^2+6*N+4)/(3*(N+1)^2) + 4*S[1](N)/(3*(N+1))", printed_c_minus2()},
          {"4/3", "-2"},
          {"8/3", "-4*(4*N^2+7*N+2)/(3*(N+1)^2) + 4*(N+2)*S[1](N)/(3*(N+1))"}};
}

// equal after multiplication by a nonzero element of Q(eps)
inline bool same_up_to_unit(const OpCoeffs& a, const OpCoeffs& b) {
  if (op_order(a) != op_order(b) || op_order(a) < 0) return false;
  int d = op_order(a);
  RatFun c = a[d] / b[d];
  if (c.num().has(NV) || c.den().has(NV)) return false;
  for (int i = 0; i < d; ++i)
    if (a[i] != c * b[i]) return false;
  return true;
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(unsigned long seed) : g(seed) {}
  long between(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }
  long nonzero(long lo, long hi) {
    long v = 0;
    while (v == 0) v = between(lo, hi);
    return v;
  }
  // polynomial in N of degree <= deg, coefficients in [-c, c]
  Poly poly_n(int deg, long c) {
    Poly p;
    for (int k = 0; k <= deg; ++k) p += Poly(between(-c, c)) * Poly::var(NV).pow(k);
    return p;
  }
  Poly poly_eps_n(int deg, long c) {
    Poly p;
    for (int k = 0; k <= deg; ++k)
      for (int j = 0; j + k <= deg; ++j) {
        Exp e{};
        e[EPS] = j;
        e[NV] = k;
        p += Poly::monomial(e, Q(between(-c, c)));
      }
    return p;
  }
  RatFun ratfun_n(int deg, long c) {
    Poly d;
    while (d.is_zero()) d = poly_n(deg, c);
    return RatFun(poly_n(deg, c), d);
  }
  // a nonempty word of weight <= w with indices in +-1..+-w
  Word word(int w) {
    std::vector<int> idx;
    int left = w;
    do {
      int a = static_cast<int>(between(1, left));
      idx.push_back(between(0, 1) ? a : -a);
      left -= a;
    } while (left > 0 && between(0, 2) > 0);
    return word_from_indices(idx);
  }
};

}  // namespace nestsolve::testing
