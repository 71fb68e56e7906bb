#include "nestsolve/eps_solver.hpp"

#include <algorithm>
#include <climits>

#include "nestsolve/errors.hpp"

namespace nestsolve {

EpsRecurrence normalize_epsilon(const EpsRecurrence& eq, int* s) {
  int minval = INT_MAX;
  for (auto& c : eq.coeffs)
    if (!c.is_zero()) minval = std::min(minval, c.eps_valuation());
  if (minval == INT_MAX) throw Error("zero recurrence operator");
  int sh = -minval;
  EpsRecurrence out = eq;
  RatFun f = RatFun::var(EPS).pow(sh);
  for (auto& c : out.coeffs) c *= f;
  out.rhs = eq.rhs.scaled_order(sh);
  if (s) *s = sh;
  return out;
}

std::vector<OpCoeffs> expand_operator(const OpCoeffs& a, int depth) {
  std::vector<OpCoeffs> out(depth, OpCoeffs(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    int val;
    auto cs = a[i].eps_series(depth, &val);
    if (val < 0) throw PoleAtZero();
    for (int t = val; t < depth; ++t) out[t][i] = cs[t - val];
  }
  return out;
}

RecurrenceEquation constant_term_recurrence(const EpsRecurrence& normalized, int order) {
  RecurrenceEquation r;
  r.coeffs = expand_operator(normalized.coeffs, 1)[0];
  r.rhs = normalized.rhs.at(order);
  r.valid_from = normalized.valid_from;
  return r;
}

Sequence peel_rhs(const std::vector<OpCoeffs>& expanded, const LaurentExpansion& rhs, const LaurentExpansion& known,
                  int j) {
  Sequence r = rhs.at(j);
  for (int t = 1; j - t >= known.start; ++t) {
    if (t >= static_cast<int>(expanded.size())) throw Error("operator expansion too short");
    if (j - t > known.end()) continue;
    const Sequence& c = known.coeffs[j - t - known.start];
    if (c.is_zero()) continue;
    for (std::size_t i = 0; i < expanded[t].size(); ++i)
      if (!expanded[t][i].is_zero()) r = r - c.shift(static_cast<long>(i)).scale(expanded[t][i]);
  }
  return r;
}

bool eps_substitution_check(const EpsRecurrence& ne, const LaurentExpansion& sol, int u, long lo, long hi,
                            long* bad_index) {
  int d = static_cast<int>(ne.coeffs.size()) - 1;
  int o = sol.start;
  std::vector<std::vector<Q>> cv;
  for (int j = o; j <= u; ++j) cv.push_back(sol.at(j).evaluate_range(lo, hi + d));
  std::vector<std::vector<Q>> rv;
  int rlo = std::min(o, ne.rhs.start);
  for (int j = rlo; j <= u; ++j) rv.push_back(ne.rhs.at(j).evaluate_range(lo, hi));
  for (long n = lo; n <= hi; ++n) {
    QSeries acc = QSeries::zero(rlo, u);
    bool skip = false;
    for (int i = 0; i <= d && !skip; ++i) {
      if (ne.coeffs[i].is_zero()) continue;
      RatFun an;
      try {
        an = ne.coeffs[i].subst(NV, Q(n));
      } catch (const Error&) {
        skip = true;
        break;
      }
      if (an.is_zero()) continue;
      if (an.eps_valuation() < 0) {
        skip = true;
        break;
      }
      QSeries as = QSeries::of(an, u - o);
      QSeries is;
      is.start = o;
      for (int j = o; j <= u; ++j) is.c.push_back(cv[j - o][n - lo + i]);
      acc = series_add(acc, series_mul(as, is, u), u);
    }
    if (skip) continue;
    for (int j = rlo; j <= u; ++j)
      if (acc.at(j) != rv[j - rlo][n - lo]) {
        if (bad_index) *bad_index = n;
        return false;
      }
  }
  return true;
}

ExpansionResult generate_expansion(const EpsRecurrence& eq, const std::vector<EpsInitialValue>& ivs, int o, int u,
                                   const SolveOptions& opt) {
  if (u < o) throw Error("empty order window");
  ExpansionResult res;
  EpsRecurrence ne = normalize_epsilon(eq, &res.s);
  if (ne.rhs.end() < u) throw RhsTooShallow(0, u - res.s);
  for (int j = ne.rhs.start; j < o && j <= ne.rhs.end(); ++j)
    if (!ne.rhs.at(j).is_zero()) throw Error("rhs has terms below the start order " + std::to_string(o));
  auto expanded = expand_operator(ne.coeffs, u - o + 1);
  RecurrenceEquation base{expanded[0], Sequence(), ne.valid_from};
  base = reduce_trailing(base);
  DalembertFactorization f = factor_dalembert(base.coeffs);
  res.expansion.start = o;
  long mu = 0;
  for (int j = o; j <= u; ++j) {
    RecurrenceEquation eqj{expanded[0], peel_rhs(expanded, ne.rhs, res.expansion, j), ne.valid_from};
    eqj = reduce_trailing(eqj);
    std::vector<InitialValue> ivj;
    for (auto& v : ivs)
      if (v.order == j) ivj.push_back({v.index, v.value});
    Decision dec;
    try {
      dec = solve_with(eqj, f, ivj, opt);
    } catch (const InsufficientInitialValues& e) {
      throw InsufficientInitialValues(e.from, e.to, "order " + std::to_string(j));
    }
    res.orders.push_back(dec);
    long need = dec.window.empty() ? dec.mu : dec.window.back();
    res.demand = std::max(res.demand, need);
    if (dec.status != Status::Solved) {
      res.status = dec.status;
      res.failed_order = j;
      res.reason = "order " + std::to_string(j) + ": " + dec.reason;
      return res;
    }
    mu = std::max(mu, dec.mu);
    res.expansion.coeffs.push_back(dec.solution);
  }
  long hi = mu + opt.check_window;
  long bad = -1;
  if (!eps_substitution_check(ne, res.expansion, u, mu, hi, &bad)) {
    res.status = Status::Inconclusive;
    res.reason = "self-check failed: eps-substitution mismatch at N=" + std::to_string(bad);
    return res;
  }
  res.verified_to = hi;
  res.status = Status::Solved;
  return res;
}

}  // namespace nestsolve
