#include "nestsolve/operator.hpp"

#include "nestsolve/errors.hpp"

namespace nestsolve {

int op_order(const OpCoeffs& a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (!a[i].is_zero()) return i;
  return -1;
}

OpCoeffs op_trim(OpCoeffs a) {
  a.resize(static_cast<std::size_t>(op_order(a) + 1));
  return a;
}

OpCoeffs normalize_operator(const OpCoeffs& a0, RatFun* multiplier) {
  OpCoeffs a = op_trim(a0);
  if (a.empty()) throw Error("zero operator");
  Poly m(1);
  for (auto& c : a) m = lcm(m, c.den());
  std::vector<Poly> b;
  for (auto& c : a) b.push_back(c.num() * exact_div(m, c.den()));
  Poly g;
  for (auto& p : b) g = gcd(g, p);
  for (auto& p : b) p = exact_div(p, g);
  Q s = b.back().lead().c;
  Z den_l = 1, num_g = 0;
  for (auto& p : b)
    for (auto& t : p.terms()) {
      Q c = t.c / s;
      mpz_lcm(den_l.get_mpz_t(), den_l.get_mpz_t(), c.get_den_mpz_t());
    }
  for (auto& p : b)
    for (auto& t : p.terms()) {
      Q c = t.c / s * Q(den_l);
      mpz_gcd(num_g.get_mpz_t(), num_g.get_mpz_t(), c.get_num_mpz_t());
    }
  Q f = Q(den_l) / (s * Q(num_g));
  OpCoeffs out;
  for (auto& p : b) out.push_back(RatFun(p * f));
  if (multiplier) *multiplier = RatFun(m * f, g);
  return out;
}

OpCoeffs right_divide(const OpCoeffs& a0, const RatFun& r, RatFun* rem) {
  OpCoeffs a = op_trim(a0);
  int d = static_cast<int>(a.size()) - 1;
  if (d < 1) throw Error("right division of an order-0 operator");
  OpCoeffs b(d);
  b[d - 1] = a[d];
  for (int j = d - 1; j >= 1; --j) b[j - 1] = a[j] + b[j] * r.shift_N(j);
  if (rem) *rem = a[0] + b[0] * r;
  return b;
}

RatFun apply_to_hypergeometric(const OpCoeffs& a, const RatFun& r) {
  RatFun acc, ratio(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) ratio *= r.shift_N(static_cast<long>(i) - 1);
    if (!a[i].is_zero()) acc += a[i] * ratio;
  }
  return acc;
}

Sequence apply_operator(const OpCoeffs& a, const Sequence& y) {
  Sequence acc;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero()) acc = acc + y.shift(static_cast<long>(i)).scale(a[i]);
  return acc;
}

OpCoeffs shift_operator(const OpCoeffs& a, long k) {
  OpCoeffs out;
  for (auto& c : a) out.push_back(c.shift_N(k));
  return out;
}

std::string op_str(const OpCoeffs& a, const std::string& fn) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    std::string arg = i == 0 ? "N" : "N+" + std::to_string(i);
    std::string c = a[i].str();
    std::string term = "(" + c + ")*" + fn + "(" + arg + ")";
    s += s.empty() ? term : " + " + term;
  }
  return s.empty() ? "0" : s;
}

}  // namespace nestsolve
