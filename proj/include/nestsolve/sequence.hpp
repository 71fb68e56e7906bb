#pragma once
#include <optional>
#include <string>
#include <vector>

#include "nestsolve/canonical.hpp"

namespace nestsolve {

// A sequence in N: canonical form when available, raw tree otherwise.
// Values are meaningful for n >= valid_from().
class Sequence {
 public:
  Sequence() : form_(CanonicalForm()), raw_(Expr()) {}
  static Sequence from_expr(const Expr& e);
  static Sequence from_form(const CanonicalForm& f, long valid = 0);
  static Sequence rational(const RatFun& f) { return from_form(CanonicalForm::rational(f), f.pole_threshold()); }
  static Sequence hyperproduct(long l, const RatFun& q);
  static Sequence sum_from(long l, const Sequence& summand);

  bool canonical() const { return form_.has_value(); }
  const CanonicalForm& form() const { return *form_; }
  Expr expr() const { return form_ ? form_->to_expr() : raw_; }
  long valid_from() const { return valid_; }
  bool is_zero() const { return form_ ? form_->is_zero() : raw_.is_zero(); }

  Sequence operator-() const { return scale(RatFun(-1)); }
  friend Sequence operator+(const Sequence& a, const Sequence& b);
  friend Sequence operator-(const Sequence& a, const Sequence& b) { return a + (-b); }
  friend Sequence operator*(const Sequence& a, const Sequence& b);
  Sequence scale(const RatFun& c) const;
  Sequence shift(long s) const;

  std::vector<Q> evaluate_range(long lo, long hi) const;
  Q evaluate(long n) const { return evaluate_range(n, n)[0]; }
  std::string str() const { return expr().str(); }
  bool same(const Sequence& o) const;

 private:
  std::optional<CanonicalForm> form_;
  Expr raw_;
  long valid_ = 0;
};

}  // namespace nestsolve
