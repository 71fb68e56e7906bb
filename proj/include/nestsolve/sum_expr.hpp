#pragma once
#include <memory>
#include <string>
#include <vector>

#include "nestsolve/ratfun.hpp"

namespace nestsolve {

// Letter (m, x) of a generalized harmonic sum: summand x^i / i^m.
struct Letter {
  int m;
  Q x;
  bool operator==(const Letter& o) const { return m == o.m && x == o.x; }
  bool operator<(const Letter& o) const { return m != o.m ? m < o.m : x < o.x; }
};
using Word = std::vector<Letter>;

bool word_less(const Word& a, const Word& b);
std::string word_str(const Word& w);
// standard index a != 0 -> letter (|a|, sign a)
Word word_from_indices(const std::vector<int>& idx);

enum class Kind { Rat, Add, Mul, Prod, Sum, Harmonic };

// Immutable expression tree in one free variable. Rat payloads use N for the free variable;
// the summand of Sum and the factor of Prod use N for the bound variable.
class Expr {
 public:
  Expr();
  static Expr rat(const RatFun& f);
  static Expr add(std::vector<Expr> xs);
  static Expr mul(std::vector<Expr> xs);
  static Expr prod(long lower, const RatFun& q);
  static Expr sum(long lower, const Expr& summand);
  static Expr harmonic(const Word& w);
  static Expr geometric(const Q& z) { return prod(1, RatFun(z)); }

  Kind kind() const;
  const RatFun& rf() const;
  const std::vector<Expr>& kids() const;
  long lower() const;
  const Word& word() const;
  bool is_rat() const { return kind() == Kind::Rat; }
  bool is_zero() const { return is_rat() && rf().is_zero(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) { return add({a, -b}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }

  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }
  std::string str(int depth = 0) const;
  // values are well defined and match the intended sequence for n >= valid_from()
  long valid_from() const;
  const void* id() const { return p_.get(); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
  std::shared_ptr<const Node> p_;
};

constexpr long kNeverValid = 1L << 40;

Q evaluate(const Expr& e, long n);
std::vector<Q> evaluate_range(const Expr& e, long lo, long hi);
std::vector<Q> harmonic_values(const Word& w, long hi);  // S_w(0..hi)

// tree-level shift e(N) -> e(N+k); quantifier bounds stay at N
Expr shift(const Expr& e, long k);

Expr parse_expr(const std::string& s);
RatFun parse_ratfun(const std::string& s);

std::string bound_var_name(int depth);

}  // namespace nestsolve
