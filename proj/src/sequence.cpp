#include "nestsolve/sequence.hpp"

#include <algorithm>

namespace nestsolve {

Sequence Sequence::from_expr(const Expr& e) {
  Sequence s;
  s.raw_ = e;
  s.form_ = canonicalize(e);
  s.valid_ = e.valid_from();
  if (s.form_) s.valid_ = std::max(s.valid_, s.form_->valid_from());
  return s;
}

Sequence Sequence::from_form(const CanonicalForm& f, long valid) {
  Sequence s;
  s.form_ = f;
  s.raw_ = f.to_expr();
  s.valid_ = std::max(valid, f.valid_from());
  return s;
}

Sequence Sequence::hyperproduct(long l, const RatFun& q) {
  Expr e = Expr::prod(l, q);
  Sequence s;
  s.raw_ = e;
  s.form_ = canonical_hyperproduct(l, q);
  s.valid_ = e.valid_from();
  if (s.form_) s.valid_ = std::max(s.valid_, s.form_->valid_from());
  return s;
}

Sequence Sequence::sum_from(long l, const Sequence& summand) {
  Sequence s;
  s.raw_ = Expr::sum(l, summand.expr());
  s.form_ = summand.form_ ? nestsolve::sum_from(l, *summand.form_) : std::nullopt;
  s.valid_ = std::max(0L, l - 1);
  if (summand.valid_ > l) s.valid_ = kNeverValid;
  if (s.form_) s.valid_ = std::max(s.valid_, s.form_->valid_from());
  return s;
}

Sequence operator+(const Sequence& a, const Sequence& b) {
  Sequence s;
  s.valid_ = std::max(a.valid_, b.valid_);
  if (a.form_ && b.form_) {
    s.form_ = *a.form_ + *b.form_;
    s.raw_ = s.form_->to_expr();
  } else {
    s.form_.reset();
    s.raw_ = a.expr() + b.expr();
  }
  return s;
}

Sequence operator*(const Sequence& a, const Sequence& b) {
  Sequence s;
  s.valid_ = std::max(a.valid_, b.valid_);
  if (a.form_ && b.form_) {
    s.form_ = *a.form_ * *b.form_;
    s.raw_ = s.form_->to_expr();
  } else {
    s.form_.reset();
    s.raw_ = a.expr() * b.expr();
  }
  return s;
}

Sequence Sequence::scale(const RatFun& c) const {
  Sequence s;
  s.valid_ = std::max(valid_, c.pole_threshold());
  if (form_) {
    s.form_ = form_->scale(c);
    s.raw_ = s.form_->to_expr();
    s.valid_ = std::max(s.valid_, s.form_->valid_from());
  } else {
    s.form_.reset();
    s.raw_ = Expr::rat(c) * raw_;
  }
  return s;
}

Sequence Sequence::shift(long k) const {
  if (k == 0) return *this;
  Sequence s;
  if (form_) {
    s.form_ = form_->shift(k);
    s.raw_ = s.form_->to_expr();
    s.valid_ = std::max({0L, valid_ - k, s.form_->valid_from()});
  } else {
    s.form_.reset();
    s.raw_ = nestsolve::shift(raw_, k);
    s.valid_ = k > 0 ? valid_ : valid_ - k;
  }
  return s;
}

std::vector<Q> Sequence::evaluate_range(long lo, long hi) const {
  return form_ ? form_->evaluate_range(lo, hi) : nestsolve::evaluate_range(raw_, lo, hi);
}

bool Sequence::same(const Sequence& o) const {
  if (form_ && o.form_) return *form_ == *o.form_;
  return expr() == o.expr();
}

}  // namespace nestsolve
