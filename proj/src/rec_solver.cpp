#include "nestsolve/rec_solver.hpp"

#include <algorithm>
#include <exception>
#include <map>

#include "nestsolve/errors.hpp"
#include "nestsolve/linalg.hpp"
#include "nestsolve/univariate.hpp"

namespace nestsolve {

const char* status_name(Status s) {
  switch (s) {
    case Status::Solved: return "Solved";
    case Status::NotNestedSum: return "NotNestedSum";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "";
}

RecurrenceEquation reduce_trailing(const RecurrenceEquation& eq0) {
  RecurrenceEquation eq = eq0;
  eq.coeffs = op_trim(eq.coeffs);
  if (eq.coeffs.empty()) throw Error("zero recurrence operator");
  while (eq.coeffs.size() > 1 && eq.coeffs[0].is_zero()) {
    OpCoeffs c;
    for (std::size_t i = 1; i < eq.coeffs.size(); ++i) c.push_back(eq.coeffs[i].shift_N(-1));
    eq.coeffs = c;
    eq.rhs = eq.rhs.shift(-1);
    eq.valid_from += 1;
  }
  return eq;
}

namespace {

UPoly as_upoly(const RatFun& f) {
  if (!f.is_poly()) throw Error("expected polynomial coefficient");
  return to_upoly(f.num(), NV);
}

std::vector<UPoly> poly_solutions_u(const std::vector<UPoly>& b) {
  int d = static_cast<int>(b.size()) - 1;
  // difference form: q_k = sum_{i>=k} binom(i,k) b_i
  std::vector<UPoly> q(d + 1);
  for (int k = 0; k <= d; ++k) {
    Z binom = 1;
    UPoly acc;
    for (int i = k; i <= d; ++i) {
      if (i > k) binom = binom * i / (i - k);
      acc = acc + b[i] * Q(binom);
    }
    q[k] = acc;
  }
  bool have = false;
  int beta = 0;
  for (int k = 0; k <= d; ++k)
    if (!q[k].is_zero() && (!have || q[k].deg() - k > beta)) {
      beta = q[k].deg() - k;
      have = true;
    }
  if (!have) return {};
  UPoly ind;
  for (int k = 0; k <= d; ++k) {
    if (q[k].is_zero() || q[k].deg() - k != beta) continue;
    UPoly ff = UPoly::constant(1);
    for (int j = 0; j < k; ++j) ff = ff * UPoly::linear(1, -j);
    ind = ind + ff * q[k].lc();
  }
  auto roots = nonneg_integer_roots(ind);
  if (roots.empty()) return {};
  long D = *std::max_element(roots.begin(), roots.end());
  int nu = static_cast<int>(D) + 1;
  std::vector<UPoly> images;
  int rows = 0;
  for (int j = 0; j < nu; ++j) {
    std::vector<Q> mono(j + 1, Q(0));
    mono[j] = 1;
    UPoly t(mono), img;
    for (int i = 0; i <= d; ++i)
      if (!b[i].is_zero()) img = img + b[i] * t.taylor_shift(i);
    rows = std::max(rows, img.deg() + 1);
    images.push_back(img);
  }
  if (rows == 0) {
    std::vector<UPoly> all;
    for (int j = 0; j < nu; ++j) {
      std::vector<Q> mono(j + 1, Q(0));
      mono[j] = 1;
      all.push_back(UPoly(mono));
    }
    return all;
  }
  Matrix<Q> m(rows, std::vector<Q>(nu, Q(0)));
  for (int j = 0; j < nu; ++j)
    for (int r = 0; r < static_cast<int>(images[j].c.size()); ++r) m[r][j] = images[j].c[r];
  std::vector<UPoly> out;
  for (auto& v : nullspace(m, nu)) out.push_back(UPoly(v));
  return out;
}

std::vector<UPoly> monic_divisors(const UPoly& p) {
  std::vector<UPoly> out{UPoly::constant(1)};
  if (p.deg() <= 0) return out;
  auto fl = factor_linear(p);
  for (auto& [rho, e] : fl.roots) {
    std::vector<UPoly> next;
    UPoly lin = UPoly::linear(1, -rho);
    for (auto& d : out) {
      UPoly acc = d;
      for (int f = 0; f <= e; ++f) {
        next.push_back(acc);
        acc = acc * lin;
      }
    }
    out = std::move(next);
  }
  if (fl.rest.deg() > 0) {
    std::size_t n = out.size();
    UPoly r = fl.rest.monic();
    for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * r);
  }
  return out;
}

RatFun from_u(const UPoly& p) { return RatFun(from_upoly(p, NV)); }

std::vector<RatFun> candidates_for(const OpCoeffs& a, const std::vector<UPoly>& p, const UPoly& A, const UPoly& B) {
  int d = static_cast<int>(p.size()) - 1;
  std::vector<UPoly> alpha(d + 1);
  int D = -1;
  for (int i = 0; i <= d; ++i) {
    if (p[i].is_zero()) continue;
    UPoly t = p[i];
    for (int j = 0; j < i; ++j) t = t * A.taylor_shift(j);
    for (int j = i; j < d; ++j) t = t * B.taylor_shift(j);
    alpha[i] = t;
    D = std::max(D, t.deg());
  }
  std::vector<Q> zc(d + 1, Q(0));
  for (int i = 0; i <= d; ++i)
    if (!alpha[i].is_zero() && alpha[i].deg() == D) zc[i] = alpha[i].lc();
  std::vector<RatFun> out;
  for (auto& [Z, mult] : rational_roots(UPoly(zc))) {
    (void)mult;
    if (Z == 0) continue;
    std::vector<UPoly> b(d + 1);
    Q zp = 1;
    for (int i = 0; i <= d; ++i) {
      b[i] = alpha[i] * zp;
      zp *= Z;
    }
    for (auto& C : poly_solutions_u(b)) {
      if (C.is_zero()) continue;
      RatFun r = RatFun(Z) * from_u(A) / from_u(B) * from_u(C.taylor_shift(1)) / from_u(C);
      if (apply_to_hypergeometric(a, r).is_zero()) out.push_back(r);
    }
  }
  return out;
}

struct HyperSetup {
  OpCoeffs a;
  std::vector<UPoly> p;
  std::vector<std::pair<UPoly, UPoly>> pairs;
};

std::optional<HyperSetup> hyper_setup(const OpCoeffs& a0) {
  HyperSetup s;
  s.a = normalize_operator(a0);
  int d = static_cast<int>(s.a.size()) - 1;
  if (d < 1 || s.a[0].is_zero()) return std::nullopt;
  for (auto& c : s.a) s.p.push_back(as_upoly(c));
  auto da = monic_divisors(s.p[0]);
  auto db = monic_divisors(s.p[d].taylor_shift(-(d - 1)));
  for (auto& A : da)
    for (auto& B : db) s.pairs.emplace_back(A, B);
  return s;
}

std::vector<RatFun> finish_certs(std::vector<std::vector<RatFun>>& found) {
  std::vector<RatFun> all;
  for (auto& v : found)
    for (auto& r : v)
      if (std::find(all.begin(), all.end(), r) == all.end()) all.push_back(r);
  std::sort(all.begin(), all.end(), [](const RatFun& x, const RatFun& y) {
    int dx = x.num().total_deg() + x.den().total_deg();
    int dy = y.num().total_deg() + y.den().total_deg();
    if (dx != dy) return dx < dy;
    return x.compare(y) < 0;
  });
  return all;
}

long lower_for(const RatFun& rm) {
  long l0 = 1;
  l0 = std::max(l0, 1 + max_nonneg_root(rm.num()));
  l0 = std::max(l0, 1 + max_nonneg_root(rm.den()));
  return l0;
}

}  // namespace

std::vector<Poly> polynomial_solutions(const OpCoeffs& a0) {
  OpCoeffs a = normalize_operator(a0);
  std::vector<UPoly> b;
  for (auto& c : a) b.push_back(as_upoly(c));
  std::vector<Poly> out;
  for (auto& u : poly_solutions_u(b)) out.push_back(from_upoly(u, NV));
  return out;
}

std::vector<RatFun> hypergeometric_solutions(const OpCoeffs& a0) {
  auto s = hyper_setup(a0);
  if (!s) return {};
  long n = static_cast<long>(s->pairs.size());
  std::vector<std::vector<RatFun>> found(n);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      found[i] = candidates_for(s->a, s->p, s->pairs[i].first, s->pairs[i].second);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return finish_certs(found);
}

std::vector<RatFun> hypergeometric_solutions_serial(const OpCoeffs& a0) {
  auto s = hyper_setup(a0);
  if (!s) return {};
  std::vector<std::vector<RatFun>> found;
  for (auto& [A, B] : s->pairs) found.push_back(candidates_for(s->a, s->p, A, B));
  return finish_certs(found);
}

Sequence hyperexponential(const RatFun& r) {
  if (r.is_zero()) return Sequence();
  RatFun rm = r.shift_N(-1);
  return Sequence::hyperproduct(lower_for(rm), rm);
}

Sequence first_order_solve(const RatFun& r, const Sequence& g) {
  if (g.is_zero()) return Sequence();
  if (r.is_zero()) return g.shift(-1);
  RatFun rm = r.shift_N(-1);
  long l0 = lower_for(rm);
  Sequence h = Sequence::hyperproduct(l0, rm);
  Sequence hinv = Sequence::hyperproduct(l0, RatFun(1) / rm);
  Sequence summand = g.shift(-1) * hinv;
  long ls = std::max(l0, summand.valid_from());
  return h * Sequence::sum_from(ls, summand);
}

DalembertFactorization factor_dalembert(const OpCoeffs& a) {
  DalembertFactorization f;
  f.op = op_trim(a);
  OpCoeffs L = f.op;
  while (op_order(L) > 0) {
    RatFun r;
    if (!L[0].is_zero()) {
      auto cs = hypergeometric_solutions(L);
      if (cs.empty()) break;
      r = cs[0];
    }
    RatFun rem;
    L = right_divide(L, r, &rem);
    if (!rem.is_zero()) throw Error("internal: certificate does not divide the operator");
    f.certs.push_back(r);
  }
  f.remainder = L;
  std::vector<Sequence> S;
  for (int k = static_cast<int>(f.certs.size()) - 1; k >= 0; --k) {
    std::vector<Sequence> T;
    Sequence h = hyperexponential(f.certs[k]);
    if (!h.is_zero()) T.push_back(h);
    for (auto& z : S) T.push_back(first_order_solve(f.certs[k], z));
    S = std::move(T);
  }
  f.basis = std::move(S);
  return f;
}

Sequence particular_solution(const DalembertFactorization& f, const Sequence& rhs) {
  if (rhs.is_zero()) return Sequence();
  if (op_order(f.remainder) != 0) throw NotFactorized();
  Sequence z = rhs.scale(RatFun(1) / f.remainder[0]);
  for (int k = static_cast<int>(f.certs.size()) - 1; k >= 0; --k) z = first_order_solve(f.certs[k], z);
  return z;
}

long compute_mu(const RecurrenceEquation& eq, const SolutionSpace& sp) {
  long mu = std::max(0L, eq.valid_from);
  for (auto& c : eq.coeffs) {
    if (c.is_zero()) continue;
    mu = std::max(mu, 1 + max_nonneg_root(c.num()));
    mu = std::max(mu, 1 + max_nonneg_root(c.den()));
  }
  mu = std::max(mu, eq.rhs.valid_from());
  for (auto& b : sp.basis) mu = std::max(mu, b.valid_from());
  if (sp.particular) mu = std::max(mu, sp.particular->valid_from());
  return mu;
}

SolutionSpace solution_space(const RecurrenceEquation& eq, const DalembertFactorization& f) {
  SolutionSpace sp;
  sp.basis = f.basis;
  try {
    sp.particular = particular_solution(f, eq.rhs);
  } catch (const NotFactorized&) {
  }
  sp.mu = compute_mu(eq, sp);
  return sp;
}

namespace {

void self_check(const RecurrenceEquation& eq, const Decision& dec, const std::map<long, Q>& iv,
                const SolveOptions& opt, Decision* out) {
  int d = op_order(eq.coeffs);
  long lo = dec.mu;
  long hi = lo + d + 10;
  auto y = dec.solution.evaluate_range(lo, hi + d);
  auto r = eq.rhs.evaluate_range(lo, hi);
  auto res = residuals(eq.coeffs, y, r, lo, hi);
  for (std::size_t i = 0; i < res.size(); ++i)
    if (res[i] != 0) {
      out->status = Status::Inconclusive;
      out->reason = "self-check failed: residual nonzero at N=" + std::to_string(lo + static_cast<long>(i));
      return;
    }
  long start = dec.window.empty() ? lo : dec.window.front();
  std::vector<Q> init;
  for (long n : dec.window) init.push_back(iv.at(n));
  long up_to = start + d - 1 + opt.check_window;
  auto rv = eq.rhs.evaluate_range(start, std::max(start, up_to - d));
  auto rhs = [&](long n) { return rv[n - start]; };
  auto ref = unroll(eq.coeffs, rhs, start, init, up_to);
  auto cmp = compare_values(dec.solution, ref, start);
  if (!cmp.equal) {
    out->status = Status::Inconclusive;
    out->reason = "self-check failed: unroll mismatch at N=" + std::to_string(cmp.index);
    return;
  }
  out->verified_to = up_to;
}

}  // namespace

Decision match_initial_values(const RecurrenceEquation& eq, const SolutionSpace& sp,
                              const std::vector<InitialValue>& ivs, const SolveOptions& opt,
                              bool fully_factorized) {
  Decision dec;
  int d = op_order(eq.coeffs);
  dec.order = d;
  dec.mu = std::max(sp.mu, compute_mu(eq, sp));
  std::map<long, Q> iv;
  for (auto& v : ivs) {
    auto it = iv.find(v.index);
    if (it != iv.end() && it->second != v.value)
      throw Error("conflicting initial values at index " + std::to_string(v.index));
    iv[v.index] = v.value;
  }
  std::vector<long> cand;
  for (auto& [n, v] : iv)
    if (n >= dec.mu) cand.push_back(n);
  std::size_t start = cand.size();
  if (d == 0) {
    start = 0;
  } else {
    for (std::size_t i = 0; i + d <= cand.size(); ++i)
      if (cand[i + d - 1] - cand[i] == d - 1) {
        start = i;
        break;
      }
    if (start == cand.size()) throw InsufficientInitialValues(dec.mu, dec.mu + d - 1, "order " + std::to_string(d));
  }
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (i >= start && i < start + static_cast<std::size_t>(d))
      dec.window.push_back(cand[i]);
    else
      dec.checked.push_back(cand[i]);
  }
  if (!sp.particular) {
    dec.status = Status::Inconclusive;
    dec.reason = "operator not fully factorized; no particular solution";
    return dec;
  }
  int m = static_cast<int>(sp.basis.size());
  Sequence y = *sp.particular;
  if (d > 0 && m > 0) {
    Matrix<Q> M(d, std::vector<Q>(m));
    std::vector<Q> rhs(d);
    auto pv = sp.particular->evaluate_range(dec.window.front(), dec.window.back());
    std::vector<std::vector<Q>> bv;
    for (auto& b : sp.basis) bv.push_back(b.evaluate_range(dec.window.front(), dec.window.back()));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < m; ++j) M[i][j] = bv[j][i];
      rhs[i] = iv[dec.window[i]] - pv[i];
    }
    if (rank(M, m) < m) {
      dec.status = Status::Inconclusive;
      dec.reason = "basis degenerate on the initial-value window";
      return dec;
    }
    auto c = solve_linear(M, rhs, m);
    if (!c) {
      dec.status = Status::Inconclusive;
      dec.reason = "initial values outside the span of the found solutions";
      return dec;
    }
    dec.constants = *c;
    for (int j = 0; j < m; ++j) y = y + sp.basis[j].scale(RatFun((*c)[j]));
  } else if (d > 0) {
    for (int i = 0; i < d; ++i)
      if (y.evaluate(dec.window[i]) != iv[dec.window[i]]) {
        dec.status = Status::Inconclusive;
        dec.reason = "no homogeneous solutions found and initial values do not match";
        return dec;
      }
  }
  dec.solution = y;
  for (long n : dec.checked)
    if (y.evaluate(n) != iv[n]) {
      bool full = fully_factorized && m == d;
      dec.status = full ? Status::NotNestedSum : Status::Inconclusive;
      dec.reason = "initial value mismatch at N=" + std::to_string(n);
      return dec;
    }
  dec.status = Status::Solved;
  self_check(eq, dec, iv, opt, &dec);
  return dec;
}

Decision solve_with(const RecurrenceEquation& eq, const DalembertFactorization& f,
                    const std::vector<InitialValue>& ivs, const SolveOptions& opt) {
  SolutionSpace sp = solution_space(eq, f);
  Decision dec = match_initial_values(eq, sp, ivs, opt, f.full());
  dec.chain_length = f.chain_length();
  dec.remainder = f.remainder;
  return dec;
}

Decision solve_recurrence(const RecurrenceEquation& eq0, const std::vector<InitialValue>& ivs,
                          const SolveOptions& opt) {
  RecurrenceEquation eq = reduce_trailing(eq0);
  return solve_with(eq, factor_dalembert(eq.coeffs), ivs, opt);
}

}  // namespace nestsolve
