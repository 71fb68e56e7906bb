#include "nestsolve/ode_frontend.hpp"

#include <algorithm>
#include <climits>
#include <map>

#include "nestsolve/errors.hpp"

namespace nestsolve {

std::vector<Fragment> term_to_operator(const Poly& a, int k) {
  std::map<long, RatFun> acc;
  RatFun nv = RatFun::var(NV);
  for (auto& t : a.terms()) {
    if (t.e[NV] != 0) throw Error("differential coefficient depends on N");
    long p = t.e[X];
    long s = k - p;
    Exp e{};
    e[EPS] = t.e[EPS];
    RatFun c = RatFun(Poly::monomial(e, t.c)) * falling_factorial(nv + RatFun(s), k);
    acc[s] += c;
  }
  std::vector<Fragment> out;
  for (auto& [s, c] : acc)
    if (!c.is_zero()) out.push_back({s, c});
  return out;
}

ConvertedSystem ode_to_recurrence(const CoupledDifferentialSystem& ode) {
  int n = ode.size();
  int delta = ode.order();
  if (n == 0) throw Error("empty differential system");
  ConvertedSystem cs;
  struct Entry {
    int comp;
    Fragment f;
  };
  std::vector<std::vector<Entry>> rows(n);
  int d = 0;
  for (int i = 0; i < n; ++i) {
    Poly l(1);
    for (int k = 0; k <= delta; ++k)
      for (int j = 0; j < n; ++j)
        if (!ode.A[k][i][j].is_zero()) l = lcm(l, ode.A[k][i][j].den());
    RatFun mult(l);
    if (mult.has(NV)) throw Error("differential coefficient depends on N");
    cs.multipliers.push_back(mult);
    long mn = LONG_MAX;
    for (int k = 0; k <= delta; ++k)
      for (int j = 0; j < n; ++j) {
        if (ode.A[k][i][j].is_zero()) continue;
        RatFun p = ode.A[k][i][j] * mult;
        if (!p.is_poly()) throw Error("internal: denominator not cleared");
        for (auto& f : term_to_operator(p.num(), k)) {
          rows[i].push_back({j, f});
          mn = std::min(mn, f.shift);
        }
      }
    if (rows[i].empty()) throw Error("equation " + std::to_string(i + 1) + " has no unknowns");
    long sigma = std::max(0L, -mn);
    cs.row_shift.push_back(sigma);
    for (auto& en : rows[i]) d = std::max<long>(d, en.f.shift + sigma);
  }
  cs.sys.A.assign(d + 1, Matrix<RatFun>(n, std::vector<RatFun>(n)));
  long vf = 0;
  for (int i = 0; i < n; ++i) {
    long sigma = cs.row_shift[i];
    for (auto& en : rows[i]) cs.sys.A[en.f.shift + sigma][i][en.comp] += en.f.coeff.shift_N(sigma);
    Recipe r;
    long pmax = 0;
    for (auto& t : cs.multipliers[i].num().terms()) {
      long p = t.e[X];
      pmax = std::max(pmax, p);
      Exp e{};
      e[EPS] = t.e[EPS];
      r = recipe_add(r, Recipe{{TermKey{Source::Rhs, i, sigma - p}, RatFun(Poly::monomial(e, t.c))}});
    }
    cs.rhs.push_back(r);
    long vi = std::max(0L, pmax - sigma);
    vf = std::max(vf, vi);
    for (long nn = -sigma; nn < vi; ++nn) {
      long m = nn + sigma;
      if (m < 0) continue;
      BoundaryEquation be;
      be.row = i;
      be.index = m;
      for (auto& en : rows[i]) {
        long arg = m + en.f.shift;
        if (arg < 0) continue;
        RatFun c = en.f.coeff.subst(NV, Q(m));
        if (!c.is_zero()) be.lhs.push_back({en.comp, arg, c});
      }
      for (auto& t : cs.multipliers[i].num().terms()) {
        long arg = m - t.e[X];
        if (arg < 0) continue;
        Exp e{};
        e[EPS] = t.e[EPS];
        be.rhs.push_back({arg, RatFun(Poly::monomial(e, t.c))});
      }
      cs.boundary.push_back(std::move(be));
    }
  }
  cs.sys.valid_from = vf;
  return cs;
}

std::vector<LaurentExpansion> convert_rhs(const ConvertedSystem& cs, const std::vector<LaurentExpansion>& rhat) {
  int n = cs.sys.size();
  if (static_cast<int>(rhat.size()) != n) throw Error("one rhs expansion per equation expected");
  std::vector<LaurentExpansion> out;
  for (int i = 0; i < n; ++i) {
    int emin = INT_MAX;
    for (auto& [k, c] : cs.rhs[i]) emin = std::min(emin, c.eps_valuation());
    if (rhat[i].coeffs.empty() || emin == INT_MAX) {
      out.push_back(LaurentExpansion{rhat[i].start, {}});
      continue;
    }
    out.push_back(instantiate(cs.rhs[i], rhat, {}, rhat[i].start + emin, rhat[i].end() + emin));
  }
  return out;
}

int check_boundary(const ConvertedSystem& cs, const std::vector<LaurentExpansion>& rhat, const ValueLookup& known) {
  int checked = 0;
  for (auto& be : cs.boundary) {
    const LaurentExpansion& r = rhat[be.row];
    std::vector<std::pair<QSeries, RatFun>> parts;
    int top = INT_MAX, bottom = INT_MAX;
    bool ok = true;
    for (auto& t : be.lhs) {
      auto v = known(t.component, t.index);
      if (!v) {
        ok = false;
        break;
      }
      top = std::min(top, v->end() + t.coeff.eps_valuation());
      bottom = std::min(bottom, v->start + t.coeff.eps_valuation());
      parts.push_back({*v, t.coeff});
    }
    if (!ok) continue;
    try {
      std::vector<std::pair<QSeries, RatFun>> rparts;
      for (auto& [m, c] : be.rhs) {
        QSeries s;
        s.start = r.start;
        for (auto& seq : r.coeffs) s.c.push_back(seq.evaluate(m));
        top = std::min(top, s.end() + c.eps_valuation());
        bottom = std::min(bottom, s.start + c.eps_valuation());
        rparts.push_back({s, c});
      }
      if (top < bottom) continue;
      QSeries lhs = QSeries::zero(bottom, top), rhs = QSeries::zero(bottom, top);
      for (auto& [s, c] : parts) lhs = series_add(lhs, series_mul(QSeries::of(c, top - s.start), s, top), top);
      for (auto& [s, c] : rparts) rhs = series_add(rhs, series_mul(QSeries::of(c, top - s.start), s, top), top);
      for (int o = bottom; o <= top; ++o)
        if (lhs.at(o) != rhs.at(o)) throw BoundaryInconsistent(be.index);
      ++checked;
    } catch (const BoundaryInconsistent&) {
      throw;
    } catch (const Error&) {
      continue;
    }
  }
  return checked;
}

OdeResult solve_coupled_ode(const CoupledDifferentialSystem& ode, const std::vector<LaurentExpansion>& rhat,
                            const std::vector<ComponentInitialValue>& ivs, int o, const std::vector<int>& targets,
                            const SolveOptions& opt) {
  OdeResult res;
  res.converted = ode_to_recurrence(ode);
  auto rp = convert_rhs(res.converted, rhat);
  res.coupled = solve_coupled(res.converted.sys, rp, ivs, o, targets, opt);
  const auto& cr = res.coupled;
  ValueLookup known = [&](int comp, long idx) -> std::optional<QSeries> {
    if (targets[comp] < o) return std::nullopt;
    QSeries s;
    s.start = o;
    bool all = true;
    for (int j = o; j <= targets[comp]; ++j) {
      auto it = std::find_if(ivs.begin(), ivs.end(), [&](const ComponentInitialValue& v) {
        return v.component == comp && v.order == j && v.index == idx;
      });
      if (it == ivs.end()) {
        all = false;
        break;
      }
      s.c.push_back(it->value);
    }
    if (all) return s;
    if (cr.status != Status::Solved || idx < cr.checked_from) return std::nullopt;
    s.c.clear();
    for (auto& seq : cr.expansions[comp].coeffs) s.c.push_back(seq.evaluate(idx));
    return s;
  };
  res.boundary_checked = check_boundary(res.converted, rhat, known);
  return res;
}

}  // namespace nestsolve
