#include "nestsolve/uncoupling.hpp"

#include <algorithm>
#include <tuple>

#include "nestsolve/errors.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

namespace {

long eps_free_pole_bound(const RatFun& f) {
  if (f.den().is_const()) return 0;
  Poly c = content(f.den(), EPS);
  if (c.is_const() || c.has(X)) return 0;
  return max_nonneg_root(c) + 1;
}

using Vec = std::vector<RatFun>;

bool vec_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const RatFun& x) { return x.is_zero(); });
}

Vec vec_shift(const Vec& v, long k) {
  Vec r;
  for (auto& x : v) r.push_back(x.shift_N(k));
  return r;
}

struct KrylovRow {
  Vec c;
  Recipe rho;  // c . I(N) + rho(N) = I_pivot(N+t)
  int pivot;
  long t;
};

Matrix<RatFun> columns(const std::vector<KrylovRow>& rows, int n) {
  Matrix<RatFun> m(n, Vec(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b)
    for (int i = 0; i < n; ++i) m[i][b] = rows[b].c[i];
  return m;
}

std::optional<Vec> express(const std::vector<KrylovRow>& rows, const Vec& v, int n) {
  if (rows.empty()) {
    if (vec_zero(v)) return Vec{};
    return std::nullopt;
  }
  return solve_linear(columns(rows, n), v, static_cast<int>(rows.size()));
}

Vec unit(int n, int j) {
  Vec v(n);
  v[j] = RatFun(1);
  return v;
}

int min_valuation(const OpCoeffs& op) {
  int m = INT_MAX;
  for (auto& c : op)
    if (!c.is_zero()) m = std::min(m, c.eps_valuation());
  return m == INT_MAX ? 0 : m;
}

}  // namespace

bool TermKey::operator<(const TermKey& o) const {
  return std::tie(src, index, shift) < std::tie(o.src, o.index, o.shift);
}

Recipe recipe_add(const Recipe& a, const Recipe& b) {
  Recipe r = a;
  for (auto& [k, v] : b) {
    auto it = r.find(k);
    if (it == r.end()) {
      if (!v.is_zero()) r.emplace(k, v);
      continue;
    }
    it->second += v;
    if (it->second.is_zero()) r.erase(it);
  }
  return r;
}

Recipe recipe_scale(const Recipe& a, const RatFun& c) {
  Recipe r;
  if (c.is_zero()) return r;
  for (auto& [k, v] : a) r.emplace(k, v * c);
  return r;
}

Recipe recipe_shift(const Recipe& a, long k) {
  Recipe r;
  for (auto& [key, v] : a) r.emplace(TermKey{key.src, key.index, key.shift + k}, v.shift_N(k));
  return r;
}

std::string recipe_str(const Recipe& r) {
  if (r.empty()) return "0";
  std::string s;
  for (auto& [k, v] : r) {
    std::string arg = "N" + (k.shift == 0 ? std::string() : (k.shift > 0 ? "+" : "") + std::to_string(k.shift));
    std::string name = (k.src == Source::Rhs ? "r" : "I") + std::to_string(k.index + 1) + "(" + arg + ")";
    std::string c = v.str();
    std::string term = c == "1" ? name : c == "-1" ? "-" + name : "(" + c + ")*" + name;
    if (!s.empty()) s += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
    else s = term;
  }
  return s;
}

CoupledSystem to_first_order(const CoupledSystem& sys) {
  int d = sys.order();
  if (d <= 1) return sys;
  int n = sys.size();
  int nn = n * d;
  CoupledSystem out;
  out.valid_from = sys.valid_from;
  out.A.assign(2, Matrix<RatFun>(nn, Vec(nn)));
  // Y_k(N+1) - Y_{k+1}(N) = 0 for k < d-1
  for (int k = 0; k + 1 < d; ++k)
    for (int i = 0; i < n; ++i) {
      int row = k * n + i;
      out.A[1][row][k * n + i] = RatFun(1);
      out.A[0][row][(k + 1) * n + i] = RatFun(-1);
    }
  for (int i = 0; i < n; ++i) {
    int row = (d - 1) * n + i;
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < n; ++j) out.A[0][row][k * n + j] = sys.A[k][i][j];
    for (int j = 0; j < n; ++j) out.A[1][row][(d - 1) * n + j] = sys.A[d][i][j];
  }
  return out;
}

std::vector<LaurentExpansion> first_order_rhs(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs) {
  int d = std::max(1, sys.order()), n = sys.size();
  std::vector<LaurentExpansion> out(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n && i < static_cast<int>(rhs.size()); ++i) out[(d - 1) * n + i] = rhs[i];
  return out;
}

namespace {

std::vector<std::optional<int>> original_depths(const CoupledSystem& sys, const std::vector<std::optional<int>>& w) {
  int d = std::max(1, sys.order()), n = sys.size();
  std::vector<std::optional<int>> out(n);
  for (int i = 0; i < n; ++i) out[i] = w[(d - 1) * n + i];
  return out;
}

}  // namespace

UncoupledForm uncouple(const CoupledSystem& fo) {
  if (fo.order() != 1) throw Error("uncoupling needs a first-order system");
  int n = fo.size();
  Matrix<RatFun> C0 = fo.A[0], C1 = fo.A[1];
  std::vector<Recipe> R(n);
  for (int i = 0; i < n; ++i) R[i][TermKey{Source::Rhs, i, 0}] = RatFun(1);
  UncoupledForm uf;
  uf.size = n;
  long pole = fo.valid_from;

  while (rank(C1, n) < n) {
    if (++uf.regularizations > 2 * n) throw Error("leading matrix stays singular");
    Matrix<RatFun> T(n, Vec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T[j][i] = C1[i][j];
    Vec v = nullspace(T, n).front();
    int k = n - 1;
    while (v[k].is_zero()) --k;
    Vec c0(n);
    Recipe rr;
    for (int i = 0; i < n; ++i) {
      if (v[i].is_zero()) continue;
      for (int j = 0; j < n; ++j) c0[j] += v[i] * C0[i][j];
      rr = recipe_add(rr, recipe_scale(R[i], v[i]));
      pole = std::max(pole, eps_free_pole_bound(v[i]));
    }
    if (vec_zero(c0)) throw Error("equations of the system are linearly dependent");
    C0[k] = Vec(n);
    C1[k] = vec_shift(c0, 1);
    R[k] = recipe_shift(rr, 1);
  }

  auto inv = *inverse(C1);
  Matrix<RatFun> M(n, Vec(n));
  std::vector<Recipe> G(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      RatFun s;
      for (int l = 0; l < n; ++l)
        if (!inv[i][l].is_zero() && !C0[l][j].is_zero()) s -= inv[i][l] * C0[l][j];
      M[i][j] = s;
      pole = std::max(pole, eps_free_pole_bound(s));
      if (!inv[i][j].is_zero()) G[i] = recipe_add(G[i], recipe_scale(R[j], inv[i][j]));
    }
  }

  std::vector<KrylovRow> B;
  std::vector<bool> is_pivot(n, false);
  while (static_cast<int>(B.size()) < n) {
    int p = 0;
    while (p < n && express(B, unit(n, p), n)) ++p;
    std::size_t block_start = B.size();
    B.push_back({unit(n, p), {}, p, 0});
    is_pivot[p] = true;
    for (;;) {
      const KrylovRow cur = B.back();
      KrylovRow nx{Vec(n), recipe_shift(cur.rho, 1), p, cur.t + 1};
      for (int i = 0; i < n; ++i) {
        if (cur.c[i].is_zero()) continue;
        RatFun ci = cur.c[i].shift_N(1);
        for (int j = 0; j < n; ++j)
          if (!M[i][j].is_zero()) nx.c[j] += ci * M[i][j];
        nx.rho = recipe_add(nx.rho, recipe_scale(G[i], ci));
      }
      auto lam = express(B, nx.c, n);
      if (!lam) {
        B.push_back(std::move(nx));
        continue;
      }
      int k = static_cast<int>(nx.t);
      OpCoeffs raw(k + 1);
      raw[k] = RatFun(1);
      Recipe rhs = nx.rho;
      long vf = pole;
      for (std::size_t b = 0; b < B.size(); ++b) {
        const RatFun& l = (*lam)[b];
        if (l.is_zero()) continue;
        vf = std::max(vf, eps_free_pole_bound(l));
        rhs = recipe_add(rhs, recipe_scale(B[b].rho, -l));
        if (b >= block_start)
          raw[B[b].t] -= l;
        else
          rhs = recipe_add(rhs, Recipe{{TermKey{Source::Pivot, B[b].pivot, B[b].t}, l}});
      }
      PivotBlock blk;
      blk.component = p;
      blk.op = normalize_operator(raw, &blk.multiplier);
      blk.rhs = recipe_scale(rhs, blk.multiplier);
      blk.valid_from = vf;
      uf.blocks.push_back(std::move(blk));
      break;
    }
  }

  for (int j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    auto beta = express(B, unit(n, j), n);
    if (!beta) throw Error("internal: Krylov rows do not span");
    BackSubstitution bs;
    bs.component = j;
    bs.valid_from = pole;
    for (std::size_t b = 0; b < B.size(); ++b) {
      const RatFun& l = (*beta)[b];
      if (l.is_zero()) continue;
      bs.valid_from = std::max(bs.valid_from, eps_free_pole_bound(l));
      bs.formula = recipe_add(bs.formula, recipe_scale(B[b].rho, -l));
      bs.formula = recipe_add(bs.formula, Recipe{{TermKey{Source::Pivot, B[b].pivot, B[b].t}, l}});
    }
    uf.back.push_back(std::move(bs));
  }
  return uf;
}

OrderPlan plan_orders(const UncoupledForm& uf, const std::vector<int>& targets) {
  OrderPlan plan;
  std::map<int, std::size_t> block_of;
  for (std::size_t b = 0; b < uf.blocks.size(); ++b) {
    const auto& blk = uf.blocks[b];
    block_of[blk.component] = b;
    PlanPivot pp;
    pp.component = blk.component;
    pp.s = -min_valuation(blk.op);
    pp.nu = targets[blk.component];
    RecurrenceEquation base{expand_operator(normalize_epsilon({blk.op, {}, blk.valid_from}, nullptr).coeffs, 1)[0],
                            Sequence(), blk.valid_from};
    base = reduce_trailing(base);
    pp.initial_values = op_order(base.coeffs);
    long mu = std::max(0L, base.valid_from);
    for (auto& c : base.coeffs) {
      if (c.is_zero()) continue;
      mu = std::max(mu, 1 + max_nonneg_root(c.num()));
      mu = std::max(mu, 1 + max_nonneg_root(c.den()));
    }
    pp.min_index = mu;
    plan.pivots.push_back(pp);
  }
  std::vector<int> w(uf.size, kNoTarget);
  auto need = [&](const Recipe& r, int order) {
    if (order == kNoTarget) return;
    for (auto& [k, c] : r) {
      int o = order - c.eps_valuation();
      if (k.src == Source::Rhs)
        w[k.index] = std::max(w[k.index], o);
      else {
        int& nu = plan.pivots[block_of.at(k.index)].nu;
        nu = std::max(nu, o);
      }
    }
  };
  for (auto& bs : uf.back) need(bs.formula, targets[bs.component]);
  for (std::size_t b = uf.blocks.size(); b-- > 0;) {
    const auto& pp = plan.pivots[b];
    need(uf.blocks[b].rhs, pp.nu == kNoTarget ? kNoTarget : pp.nu - pp.s);
  }
  for (int v : w) plan.rhs_depth.push_back(v == kNoTarget ? std::nullopt : std::optional<int>(v));
  return plan;
}

OrderPlan analyze(const CoupledSystem& sys, const std::vector<int>& targets) {
  int n = sys.size();
  if (static_cast<int>(targets.size()) != n) throw Error("one target order per component expected");
  auto fo = to_first_order(sys);
  auto uf = uncouple(fo);
  std::vector<int> tg(fo.size(), kNoTarget);
  std::copy(targets.begin(), targets.end(), tg.begin());
  auto plan = plan_orders(uf, tg);
  plan.rhs_depth = original_depths(sys, plan.rhs_depth);
  return plan;
}

int recipe_start(const Recipe& r, const std::vector<LaurentExpansion>& rhs,
                 const std::map<int, LaurentExpansion>& pivots, int fallback) {
  int start = fallback;
  for (auto& [k, coef] : r) {
    const LaurentExpansion* x = nullptr;
    if (k.src == Source::Rhs) {
      if (k.index < static_cast<int>(rhs.size())) x = &rhs[k.index];
    } else {
      auto it = pivots.find(k.index);
      if (it != pivots.end()) x = &it->second;
    }
    if (x && !x->coeffs.empty()) start = std::min(start, x->start + coef.eps_valuation());
  }
  return start;
}

LaurentExpansion instantiate(const Recipe& r, const std::vector<LaurentExpansion>& rhs,
                             const std::map<int, LaurentExpansion>& pivots, int lo, int hi) {
  LaurentExpansion out;
  out.start = lo;
  out.coeffs.assign(std::max(0, hi - lo + 1), Sequence());
  for (auto& [k, c] : r) {
    const LaurentExpansion* x = nullptr;
    if (k.src == Source::Rhs) {
      if (k.index < static_cast<int>(rhs.size())) x = &rhs[k.index];
    } else {
      auto it = pivots.find(k.index);
      if (it == pivots.end()) throw Error("pivot expansion missing for component " + std::to_string(k.index + 1));
      x = &it->second;
    }
    if (!x || x->coeffs.empty()) continue;
    int v = c.eps_valuation();
    int count = hi - (x->start + v) + 1;
    if (count <= 0) continue;
    int val;
    auto cs = c.eps_series(count, &val);
    for (int t = 0; t < count; ++t) {
      if (cs[t].is_zero()) continue;
      for (int j = x->start; j <= hi - v - t; ++j) {
        int ord = j + v + t;
        if (ord < lo) {
          if (!x->at(j).is_zero()) throw Error("recipe term below the requested start order");
          continue;
        }
        if (j > x->end()) throw Error("expansion too shallow for recipe term");
        const Sequence& s = x->coeffs[j - x->start];
        if (s.is_zero()) continue;
        out.coeffs[ord - lo] = out.coeffs[ord - lo] + s.shift(k.shift).scale(cs[t]);
      }
    }
  }
  return out;
}

bool coupled_substitution_check(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs,
                                const std::vector<LaurentExpansion>& sol, long lo, long hi, long* bad_index,
                                int* bad_row) {
  int n = sys.size();
  int d = sys.order();
  std::vector<std::vector<std::vector<Q>>> vals(n);
  for (int j = 0; j < n; ++j)
    for (auto& c : sol[j].coeffs) vals[j].push_back(c.evaluate_range(lo, hi + d));
  for (int i = 0; i < n; ++i) {
    int top = rhs[i].end();
    int bottom = rhs[i].coeffs.empty() ? INT_MAX : rhs[i].start;
    for (int k = 0; k <= d; ++k)
      for (int j = 0; j < n; ++j) {
        const RatFun& a = sys.A[k][i][j];
        if (a.is_zero()) continue;
        top = std::min(top, sol[j].end() + a.eps_valuation());
        bottom = std::min(bottom, sol[j].start + a.eps_valuation());
      }
    if (top < bottom) continue;
    std::vector<std::vector<Q>> rv;
    for (int o = bottom; o <= top; ++o) rv.push_back(rhs[i].at(o).evaluate_range(lo, hi));
    for (long n0 = lo; n0 <= hi; ++n0) {
      QSeries acc = QSeries::zero(bottom, top);
      bool skip = false;
      for (int k = 0; k <= d && !skip; ++k)
        for (int j = 0; j < n && !skip; ++j) {
          const RatFun& a = sys.A[k][i][j];
          if (a.is_zero() || sol[j].coeffs.empty()) continue;
          RatFun an;
          try {
            an = a.subst(NV, Q(n0));
          } catch (const Error&) {
            skip = true;
            break;
          }
          if (an.is_zero()) continue;
          if (an.eps_valuation() < a.eps_valuation()) {
            skip = true;
            break;
          }
          QSeries is;
          is.start = sol[j].start;
          for (auto& v : vals[j]) is.c.push_back(v[n0 - lo + k]);
          acc = series_add(acc, series_mul(QSeries::of(an, top - is.start), is, top), top);
        }
      if (skip) continue;
      for (int o = bottom; o <= top; ++o)
        if (acc.at(o) != rv[o - bottom][n0 - lo]) {
          if (bad_index) *bad_index = n0;
          if (bad_row) *bad_row = i;
          return false;
        }
    }
  }
  return true;
}

CoupledResult solve_coupled(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs,
                            const std::vector<ComponentInitialValue>& ivs, int o, const std::vector<int>& targets,
                            const SolveOptions& opt) {
  int n = sys.size();
  if (static_cast<int>(rhs.size()) != n) throw Error("one rhs expansion per component expected");
  if (static_cast<int>(targets.size()) != n) throw Error("one target order per component expected");
  CoupledResult res;
  auto fo = to_first_order(sys);
  auto uf = uncouple(fo);
  int nn = fo.size();
  std::vector<int> tg(nn, kNoTarget);
  std::copy(targets.begin(), targets.end(), tg.begin());
  auto plan = plan_orders(uf, tg);
  res.plan = plan;
  res.plan.rhs_depth = original_depths(sys, plan.rhs_depth);
  for (int i = 0; i < n; ++i)
    if (res.plan.rhs_depth[i] && rhs[i].end() < *res.plan.rhs_depth[i]) throw RhsTooShallow(i, *res.plan.rhs_depth[i]);
  auto frhs = first_order_rhs(sys, rhs);

  std::map<int, LaurentExpansion> pivots;
  long lo = std::max(0L, sys.valid_from);
  for (std::size_t b = 0; b < uf.blocks.size(); ++b) {
    const auto& blk = uf.blocks[b];
    const auto& pp = plan.pivots[b];
    int c = blk.component;
    if (pp.nu < o) {
      pivots[c] = LaurentExpansion{o, {}};
      continue;
    }
    EpsRecurrence er;
    er.coeffs = blk.op;
    er.valid_from = blk.valid_from;
    int top = pp.nu - pp.s;
    er.rhs = instantiate(blk.rhs, frhs, pivots, std::min(recipe_start(blk.rhs, frhs, pivots, o - pp.s), top), top);
    std::vector<EpsInitialValue> piv;
    int comp = c % n;
    long off = c / n;
    for (auto& v : ivs)
      if (v.component == comp && v.index - off >= 0) piv.push_back({v.order, v.index - off, v.value});
    ExpansionResult er_res;
    try {
      er_res = generate_expansion(er, piv, o, pp.nu, opt);
    } catch (const InsufficientInitialValues& e) {
      throw InsufficientInitialValues(e.from + off, e.to + off,
                                      "component " + std::to_string(comp + 1) + ", " + std::string(e.what()));
    }
    res.pivot_results.push_back(er_res);
    if (er_res.status != Status::Solved) {
      res.status = er_res.status;
      res.failed_component = comp;
      res.reason = "component " + std::to_string(comp + 1) + ", " + er_res.reason;
      return res;
    }
    for (auto& dec : er_res.orders) lo = std::max(lo, dec.mu);
    pivots[c] = er_res.expansion;
  }

  res.expansions.assign(n, LaurentExpansion{o, {}});
  for (int c = 0; c < n; ++c) {
    if (targets[c] < o) continue;
    auto it = pivots.find(c);
    if (it != pivots.end()) {
      auto e = it->second;
      e.coeffs.resize(targets[c] - o + 1);
      res.expansions[c] = e;
      continue;
    }
    auto bs = std::find_if(uf.back.begin(), uf.back.end(), [&](const BackSubstitution& x) { return x.component == c; });
    lo = std::max(lo, bs->valid_from);
    int start = recipe_start(bs->formula, frhs, pivots, o);
    auto e = instantiate(bs->formula, frhs, pivots, start, targets[c]);
    for (int j = start; j < o; ++j)
      if (!e.at(j).is_zero()) {
        res.status = Status::Inconclusive;
        res.failed_component = c;
        res.reason = "component " + std::to_string(c + 1) + " has a nonzero term at order " + std::to_string(j) +
                     " below the start order";
        return res;
      }
    LaurentExpansion t{o, {}};
    for (int j = o; j <= targets[c]; ++j) t.coeffs.push_back(e.at(j));
    res.expansions[c] = t;
  }
  for (auto& e : res.expansions)
    for (auto& s : e.coeffs) lo = std::max(lo, s.valid_from());

  for (auto& v : ivs) {
    if (v.component < 0 || v.component >= n) continue;
    const auto& e = res.expansions[v.component];
    if (v.order < o || v.order > e.end() || v.index < lo) continue;
    if (e.at(v.order).evaluate(v.index) != v.value) {
      res.status = Status::Inconclusive;
      res.failed_component = v.component;
      res.reason = "supplied value of component " + std::to_string(v.component + 1) + " at N=" +
                   std::to_string(v.index) + ", order " + std::to_string(v.order) + " disagrees with the solution";
      return res;
    }
  }

  long hi = lo + opt.check_window;
  long bad = -1;
  int row = -1;
  if (!coupled_substitution_check(sys, rhs, res.expansions, lo, hi, &bad, &row)) {
    res.status = Status::Inconclusive;
    res.reason = "self-check failed: equation " + std::to_string(row + 1) + " violated at N=" + std::to_string(bad);
    return res;
  }
  res.checked_from = lo;
  res.verified_to = hi;
  res.status = Status::Solved;
  return res;
}

}  // namespace nestsolve
