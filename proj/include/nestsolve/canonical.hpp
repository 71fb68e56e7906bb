#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nestsolve/sum_expr.hpp"

namespace nestsolve {

// P_alpha(N)^e with P_alpha(N) = prod_{k=1}^N (k + alpha), 0 <= alpha < 1
struct ProdFactor {
  Q alpha;
  int e;
  bool operator==(const ProdFactor& o) const { return alpha == o.alpha && e == o.e; }
};

// z^N * prod P_alpha(N)^e * S_word(N)
struct Monomial {
  Q z = 1;
  std::vector<ProdFactor> prod;
  Word word;
  bool operator==(const Monomial& o) const { return z == o.z && prod == o.prod && word == o.word; }
  bool is_one() const { return z == 1 && prod.empty() && word.empty(); }
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Q(N)-linear combination of monomials
class CanonicalForm {
 public:
  using Terms = std::map<Monomial, RatFun, MonomialLess>;

  CanonicalForm() = default;
  static CanonicalForm rational(const RatFun& f);
  static CanonicalForm harmonic(const Word& w);
  static CanonicalForm monomial(const Monomial& m, const RatFun& c);

  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_rational() const;
  RatFun rational_part() const;

  CanonicalForm operator-() const;
  friend CanonicalForm operator+(const CanonicalForm& a, const CanonicalForm& b);
  friend CanonicalForm operator-(const CanonicalForm& a, const CanonicalForm& b);
  friend CanonicalForm operator*(const CanonicalForm& a, const CanonicalForm& b);
  CanonicalForm scale(const RatFun& c) const;
  CanonicalForm& operator+=(const CanonicalForm& o);
  bool operator==(const CanonicalForm& o) const { return t_ == o.t_; }
  bool operator!=(const CanonicalForm& o) const { return !(*this == o); }

  CanonicalForm shift(long s) const;
  std::vector<Q> evaluate_range(long lo, long hi) const;
  Q evaluate(long n) const { return evaluate_range(n, n)[0]; }
  long valid_from() const;  // first index free of coefficient poles

  Expr to_expr() const;
  std::string str() const { return to_expr().str(); }

 private:
  void add_term(const Monomial& m, const RatFun& c);
  Terms t_;
};

// S_u * S_v as a combination of single words
std::map<Word, Q> quasi_shuffle(const Word& u, const Word& v);
CanonicalForm quasi_shuffle_product(const Word& u, const Word& v);

// S_w(N+s) as a canonical form
CanonicalForm shift_word(const Word& w, long s);

// prod_{k=l}^N q(k)
std::optional<CanonicalForm> canonical_hyperproduct(long l, const RatFun& q);
// sum_{k=l}^N f(k)
std::optional<CanonicalForm> sum_from(long l, const CanonicalForm& f);

std::optional<CanonicalForm> canonicalize(const Expr& e);
std::optional<Word> detect_harmonic(const Expr& e);

}  // namespace nestsolve
