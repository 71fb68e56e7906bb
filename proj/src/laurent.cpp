#include "nestsolve/laurent.hpp"

#include <algorithm>

#include "nestsolve/errors.hpp"

namespace nestsolve {

Sequence LaurentExpansion::at(int order) const {
  if (order < start) return Sequence();
  if (order > end()) throw Error("expansion not available at order " + std::to_string(order));
  return coeffs[order - start];
}

LaurentExpansion LaurentExpansion::scaled_order(int s) const {
  LaurentExpansion r = *this;
  r.start += s;
  return r;
}

std::string LaurentExpansion::str() const {
  std::string s;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].is_zero()) continue;
    int o = start + static_cast<int>(i);
    std::string term = "(" + coeffs[i].str() + ")";
    if (o != 0) term += "*eps^" + (o < 0 ? "(" + std::to_string(o) + ")" : std::to_string(o));
    s += s.empty() ? term : " + " + term;
  }
  s += (s.empty() ? "" : " + ") + std::string("O(eps^") +
       (end() + 1 < 0 ? "(" + std::to_string(end() + 1) + ")" : std::to_string(end() + 1)) + ")";
  return s;
}

Q QSeries::at(int order) const {
  if (order < start) return 0;
  if (order > end()) throw Error("series not available at order " + std::to_string(order));
  return c[order - start];
}

QSeries QSeries::zero(int start, int end) {
  QSeries s;
  s.start = start;
  s.c.assign(std::max(0, end - start + 1), Q(0));
  return s;
}

QSeries QSeries::of(const RatFun& f, int end) {
  if (f.is_zero()) return zero(end + 1, end);
  int val = f.eps_valuation();
  int count = std::max(0, end - val + 1);
  QSeries s;
  s.start = val;
  if (count == 0) return zero(end + 1, end);
  int v2;
  auto cs = f.eps_series(count, &v2);
  for (auto& x : cs) {
    if (!x.is_const()) throw Error("series coefficient depends on N");
    s.c.push_back(x.const_value());
  }
  return s;
}

QSeries series_mul(const QSeries& a, const QSeries& b, int end) {
  QSeries r = QSeries::zero(a.start + b.start, end);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) {
      int o = a.start + b.start + static_cast<int>(i + j);
      if (o > end) break;
      r.c[o - r.start] += a.c[i] * b.c[j];
    }
  }
  return r;
}

QSeries series_add(const QSeries& a, const QSeries& b, int end) {
  QSeries r = QSeries::zero(std::min(a.start, b.start), end);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    int o = a.start + static_cast<int>(i);
    if (o <= end) r.c[o - r.start] += a.c[i];
  }
  for (std::size_t i = 0; i < b.c.size(); ++i) {
    int o = b.start + static_cast<int>(i);
    if (o <= end) r.c[o - r.start] += b.c[i];
  }
  return r;
}

}  // namespace nestsolve
