#include "nestsolve/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>

#include <omp.h>

#include "nestsolve/errors.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

long default_check_window() {
  if (const char* s = std::getenv("NESTSOLVE_CHECK_WINDOW")) {
    try {
      long w = std::stol(s);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return kDefaultCheckWindow;
}

std::vector<Q> unroll(const OpCoeffs& a, const std::function<Q(long)>& rhs, long start, const std::vector<Q>& init,
                      long up_to) {
  int d = op_order(a);
  if (d < 0) throw Error("cannot unroll the zero operator");
  if (static_cast<int>(init.size()) < d) throw Error("unroll needs d initial values");
  std::vector<Q> v(init.begin(), init.begin() + d);
  for (long n = start; n + d <= up_to; ++n) {
    Q lead = a[d].eval_N(n);
    if (lead == 0) throw SingularLeading(n);
    Q acc = rhs(n);
    for (int i = 0; i < d; ++i)
      if (!a[i].is_zero()) acc -= a[i].eval_N(n) * v[n - start + i];
    v.push_back(acc / lead);
  }
  return v;
}

namespace {

struct SeriesTerm {
  RatFun c;
  const QSeries* s;
};

// sum c * s, exact through the smallest order any term is known to
QSeries combine(const std::vector<SeriesTerm>& terms, int cap) {
  int top = cap, bottom = cap + 1;
  for (auto& t : terms) {
    if (t.c.is_zero()) continue;
    int v = t.c.eps_valuation();
    top = std::min(top, t.s->end() + v);
    bottom = std::min(bottom, t.s->start + v);
  }
  if (bottom > top) return QSeries::zero(top + 1, top);
  QSeries acc = QSeries::zero(bottom, top);
  for (auto& t : terms) {
    if (t.c.is_zero() || t.s->c.empty()) continue;
    acc = series_add(acc, series_mul(QSeries::of(t.c, top - t.s->start), *t.s, top), top);
  }
  return acc;
}

QSeries rhs_at(const LaurentExpansion& r, long n, int cap) {
  if (r.coeffs.empty()) return QSeries::zero(cap + 1, cap);
  QSeries s;
  s.start = r.start;
  for (auto& c : r.coeffs) {
    if (s.end() >= cap) break;
    s.c.push_back(c.evaluate(n));
  }
  return s;
}

RatFun at_index(const RatFun& f, long n) {
  try {
    return f.subst(NV, Q(n));
  } catch (const Error&) {
    throw SingularLeading(n);
  }
}

long eps_free_root_bound(const Poly& p) {
  if (p.is_const()) return 0;
  Poly c = content(p, EPS);
  if (c.is_const() || c.has(X)) return 0;
  return max_nonneg_root(c) + 1;
}

}  // namespace

long regular_from(const OpCoeffs& a) {
  int d = op_order(a);
  if (d < 0) return 0;
  long r = eps_free_root_bound(a[d].num());
  for (auto& c : a)
    if (!c.is_zero()) r = std::max(r, eps_free_root_bound(c.den()));
  return r;
}

std::vector<QSeries> unroll_eps(const OpCoeffs& a, const LaurentExpansion& rhs, long start,
                                const std::vector<QSeries>& init, long up_to, int cap) {
  int d = op_order(a);
  if (d < 0) throw Error("cannot unroll the zero operator");
  if (static_cast<int>(init.size()) < d) throw Error("unroll needs d initial values");
  std::vector<QSeries> v(init.begin(), init.begin() + d);
  for (long n = start; n + d <= up_to; ++n) {
    RatFun lead = at_index(a[d], n);
    if (lead.is_zero()) throw SingularLeading(n);
    QSeries r = rhs_at(rhs, n, cap);
    std::vector<RatFun> cs;
    cs.push_back(RatFun(1) / lead);
    for (int i = 0; i < d; ++i) cs.push_back(a[i].is_zero() ? RatFun() : -at_index(a[i], n) / lead);
    std::vector<SeriesTerm> terms{{cs[0], &r}};
    for (int i = 0; i < d; ++i) terms.push_back({cs[i + 1], &v[n - start + i]});
    v.push_back(combine(terms, cap));
  }
  return v;
}

std::vector<std::vector<QSeries>> unroll_system(const std::vector<Matrix<RatFun>>& A,
                                                const std::vector<LaurentExpansion>& rhs, long start,
                                                const std::vector<std::vector<QSeries>>& init, long up_to,
                                                int cap) {
  int d = static_cast<int>(A.size()) - 1;
  int n = static_cast<int>(A[0].size());
  if (static_cast<int>(init.size()) < d) throw Error("unroll needs d initial vectors");
  std::vector<std::vector<QSeries>> v(init.begin(), init.begin() + d);
  for (long m = start; m + d <= up_to; ++m) {
    Matrix<RatFun> lead(n, std::vector<RatFun>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lead[i][j] = at_index(A[d][i][j], m);
    auto inv = inverse(lead);
    if (!inv) throw SingularLeading(m);
    std::vector<QSeries> rs;
    for (int i = 0; i < n; ++i) rs.push_back(rhs_at(rhs[i], m, cap));
    // b_l = r_l - sum_{k<d} A_k[l][j] I_j(m+k)
    std::vector<QSeries> b;
    for (int l = 0; l < n; ++l) {
      std::vector<RatFun> cs;
      cs.reserve(1 + d * n);
      cs.push_back(RatFun(1));
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < n; ++j) cs.push_back(A[k][l][j].is_zero() ? RatFun() : -at_index(A[k][l][j], m));
      std::vector<SeriesTerm> terms{{cs[0], &rs[l]}};
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < n; ++j) terms.push_back({cs[1 + k * n + j], &v[m - start + k][j]});
      b.push_back(combine(terms, cap));
    }
    std::vector<QSeries> next;
    for (int i = 0; i < n; ++i) {
      std::vector<SeriesTerm> terms;
      for (int l = 0; l < n; ++l) terms.push_back({(*inv)[i][l], &b[l]});
      next.push_back(combine(terms, cap));
    }
    v.push_back(std::move(next));
  }
  return v;
}

std::vector<Q> evaluate_points(const Sequence& s, const std::vector<long>& points) {
  // sorted distinct points, split into contiguous groups; one evaluate_range per group
  std::vector<long> sorted(points);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  long m = static_cast<long>(sorted.size());
  if (m == 0) return {};
  long parts = std::max(1L, std::min<long>(omp_get_max_threads(), m / 8));
  std::vector<std::vector<Q>> vals(parts);
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (long t = 0; t < parts; ++t) {
    long a = m * t / parts, b = m * (t + 1) / parts - 1;
    try {
      auto r = s.evaluate_range(sorted[a], sorted[b]);
      for (long i = a; i <= b; ++i) vals[t].push_back(r[sorted[i] - sorted[a]]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  std::map<long, Q> at;
  for (long t = 0; t < parts; ++t)
    for (long i = m * t / parts, k = 0; i <= m * (t + 1) / parts - 1; ++i, ++k) at.emplace(sorted[i], vals[t][k]);
  std::vector<Q> out;
  out.reserve(points.size());
  for (long p : points) out.push_back(at.at(p));
  return out;
}

std::vector<Q> evaluate_points_serial(const Sequence& s, const std::vector<long>& points) {
  std::vector<Q> out;
  out.reserve(points.size());
  for (long p : points) out.push_back(s.evaluate(p));
  return out;
}

namespace {

Comparison first_difference(const std::vector<Q>& a, const std::vector<Q>& b, long lo) {
  Comparison c;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) {
      c.equal = false;
      c.index = lo + static_cast<long>(i);
      c.lhs = a[i];
      c.rhs = b[i];
      break;
    }
  return c;
}

std::vector<long> range(long lo, long hi) {
  std::vector<long> p;
  for (long n = lo; n <= hi; ++n) p.push_back(n);
  return p;
}

}  // namespace

Comparison pointwise_equal(const Sequence& a, const Sequence& b, long lo, long hi) {
  auto pts = range(lo, hi);
  return first_difference(evaluate_points(a, pts), evaluate_points(b, pts), lo);
}

Comparison pointwise_equal_serial(const Sequence& a, const Sequence& b, long lo, long hi) {
  return first_difference(a.evaluate_range(lo, hi), b.evaluate_range(lo, hi), lo);
}

Comparison compare_values(const Sequence& a, const std::vector<Q>& ref, long lo) {
  if (ref.empty()) return {};
  return first_difference(a.evaluate_range(lo, lo + static_cast<long>(ref.size()) - 1), ref, lo);
}

std::vector<Q> residuals(const OpCoeffs& a, const std::vector<Q>& y, const std::vector<Q>& r, long lo, long hi) {
  long len = hi - lo + 1;
  if (len <= 0) return {};
  std::vector<Q> out(len);
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (long k = 0; k < len; ++k) {
    try {
      Q acc = r[k];
      for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero()) acc -= a[i].eval_N(lo + k) * y[k + i];
      out[k] = acc;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

std::vector<Q> residuals_serial(const OpCoeffs& a, const std::vector<Q>& y, const std::vector<Q>& r, long lo,
                                long hi) {
  std::vector<Q> out;
  for (long n = lo; n <= hi; ++n) {
    Q acc = r[n - lo];
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!a[i].is_zero()) acc -= a[i].eval_N(n) * y[n - lo + i];
    out.push_back(acc);
  }
  return out;
}

}  // namespace nestsolve
