#include <doctest.h>

#include "nestsolve/errors.hpp"
#include "nestsolve/ode_frontend.hpp"
#include "nestsolve/problem.hpp"
#include "planted.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

namespace {

const Problem& ode_problem() {
  static const Problem p = load_problem(NESTSOLVE_SOURCE_DIR "/problems/coupled-ode.json");
  return p;
}

const Problem& rec_problem() {
  static const Problem p = load_problem(NESTSOLVE_SOURCE_DIR "/problems/coupled-rec.json");
  return p;
}

CoupledDifferentialSystem ode_system() { return {ode_problem().matrices}; }

// the same system with the identity as leading matrix
CoupledDifferentialSystem identity_variant() {
  auto s = ode_system();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.A[1][i][j] = RatFun(i == j ? 1 : 0);
  return s;
}

OpCoeffs pivot_operator(const CoupledSystem& sys) {
  auto uf = uncouple(to_first_order(sys));
  REQUIRE(uf.blocks.size() == 1);
  return uf.blocks[0].op;
}

Poly px(const std::string& s) { return rf(s).num(); }

Q falling(long a, int k) {
  Q r(1);
  for (int i = 0; i < k; ++i) r *= Q(a - i);
  return r;
}

}  // namespace

TEST_CASE("differential terms become shifted fragments") {
  auto f = term_to_operator(px("1"), 1);
  REQUIRE(f.size() == 1);
  CHECK(f[0].shift == 1);
  CHECK(f[0].coeff == rf("N+1"));

  f = term_to_operator(px("x"), 0);
  REQUIRE(f.size() == 1);
  CHECK(f[0].shift == -1);
  CHECK(f[0].coeff == RatFun(1));

  f = term_to_operator(px("x"), 1);
  REQUIRE(f.size() == 1);
  CHECK(f[0].shift == 0);
  CHECK(f[0].coeff == rf("N"));

  f = term_to_operator(px("eps*x^2 + 3"), 2);
  REQUIRE(f.size() == 2);
  CHECK(f[0].shift == 0);
  CHECK(f[0].coeff == rf("eps*N*(N-1)"));
  CHECK(f[1].shift == 2);
  CHECK(f[1].coeff == rf("3*(N+2)*(N+1)"));
}

TEST_CASE("scalar differential equations") {
  // Ihat' = Ihat, Ihat(0) = 1
  CoupledDifferentialSystem e{{{{rf("-1")}}, {{rf("1")}}}};
  auto cs = ode_to_recurrence(e);
  CHECK(cs.sys.A[0][0][0] == rf("-1"));
  CHECK(cs.sys.A[1][0][0] == rf("N+1"));
  CHECK(cs.boundary.empty());
  auto res = solve_coupled_ode(e, {LaurentExpansion{0, {Sequence()}}}, {{0, 0, 0, 1}}, 0, {0});
  REQUIRE_MESSAGE(res.coupled.status == Status::Solved, res.coupled.reason);
  for (long n = 0; n <= 8; ++n) CHECK(res.coupled.expansions[0].at(0).evaluate(n) * falling(n, static_cast<int>(n)) == 1);

  // (1-x) Ihat' = 1/(1-x): denominators are cleared row by row
  CoupledDifferentialSystem g{{{{rf("0")}}, {{rf("1")}}}};
  g.A[1][0][0] = rf("1-x");
  cs = ode_to_recurrence(g);
  CHECK(cs.multipliers[0] == RatFun(1));
  CHECK(cs.sys.A[1][0][0] == rf("N+1"));
  CHECK(cs.sys.A[0][0][0] == rf("-N"));
  CoupledDifferentialSystem h{{{{rf("0")}}, {{rf("1")}}}};
  h.A[1][0][0] = rf("1/(1-x)");
  cs = ode_to_recurrence(h);
  CHECK(cs.multipliers[0] == rf("x-1"));
  CHECK_FALSE(cs.boundary.empty());
}

TEST_CASE("conversion matches power-series coefficients") {
  Rng r(61);
  for (int it = 0; it < 8; ++it) {
    int n = static_cast<int>(r.between(1, 3)), delta = static_cast<int>(r.between(1, 2));
    CoupledDifferentialSystem ode;
    for (int k = 0; k <= delta; ++k) {
      Matrix<RatFun> m(n, std::vector<RatFun>(n));
      for (auto& row : m)
        for (auto& a : row) {
          Poly p;
          for (int e = 0; e <= 2; ++e) p += Poly(r.between(-3, 3)) * Poly::var(X).pow(e);
          a = RatFun(p);
        }
      for (int i = 0; i < n; ++i)
        if (m[i][i].is_zero() && k == delta) m[i][i] = RatFun(1);
      ode.A.push_back(m);
    }
    auto cs = ode_to_recurrence(ode);
    const int M = 30;
    std::vector<std::vector<Q>> I(n, std::vector<Q>(M + 8));
    for (auto& v : I)
      for (auto& q : v) q = qq(r.between(-9, 9), r.between(1, 4));
    for (int i = 0; i < n; ++i) {
      REQUIRE(cs.multipliers[i] == RatFun(1));
      long sigma = cs.row_shift[i];
      for (long N = 0; N + sigma <= 20; ++N) {
        long m = N + sigma;
        Q direct(0), conv(0);
        for (int k = 0; k <= delta; ++k)
          for (int j = 0; j < n; ++j)
            for (auto& t : ode.A[k][i][j].num().terms()) {
              long p = t.e[X];
              if (m - p < 0) continue;
              direct += t.c * falling(m - p + k, k) * I[j][m - p + k];
            }
        for (int k = 0; k <= cs.sys.order(); ++k)
          for (int j = 0; j < n; ++j) {
            auto& c = cs.sys.A[k][i][j];
            if (!c.is_zero()) conv += c.num().eval_N(Q(N)) / c.den().eval_N(Q(N)) * I[j][N + k];
          }
        CHECK(direct == conv);
      }
    }
  }
}

TEST_CASE("conversion is linear in the rhs") {
  auto cs = ode_to_recurrence(ode_system());
  auto& p = ode_problem();
  std::vector<LaurentExpansion> a = p.rhs, b = p.rhs, sum = p.rhs;
  for (int i = 0; i < 3; ++i) {
    b[i].coeffs = {seq("S[1](N)"), seq("N")};
    sum[i].coeffs = {a[i].coeffs[0] + b[i].coeffs[0], a[i].coeffs[1] + b[i].coeffs[1]};
  }
  auto ca = convert_rhs(cs, a), cb = convert_rhs(cs, b), cc = convert_rhs(cs, sum);
  for (int i = 0; i < 3; ++i)
    for (int j = cc[i].start; j <= cc[i].end(); ++j)
      CHECK(pointwise_equal(cc[i].at(j), ca[i].at(j) + cb[i].at(j), 1, 15).equal);
}

TEST_CASE("the shipped differential system converts to the coupled difference system") {
  auto cs = ode_to_recurrence(ode_system());
  auto& target = rec_problem().matrices;
  REQUIRE(cs.sys.A.size() == target.size());
  // each row is a constant multiple of the difference row
  std::vector<RatFun> ratio(3);
  for (std::size_t k = 0; k < target.size(); ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(cs.sys.A[k][i][j].is_zero() == target[k][i][j].is_zero());
        if (target[k][i][j].is_zero()) continue;
        RatFun q = cs.sys.A[k][i][j] / target[k][i][j];
        if (ratio[i].is_zero()) ratio[i] = q;
        CHECK(q == ratio[i]);
      }
  CHECK(ratio[0] == RatFun(1));
  CHECK(ratio[1] == ratio[2]);
  CHECK_FALSE(ratio[1].has(NV));
  CHECK(same_up_to_unit(pivot_operator(cs.sys), normalize_operator(eps_rec_op())));
}

TEST_CASE("the identity leading matrix gives a different pivot operator") {
  auto cs = ode_to_recurrence(identity_variant());
  auto op = pivot_operator(cs.sys);
  CHECK_FALSE(same_up_to_unit(op, normalize_operator(eps_rec_op())));
}

TEST_CASE("solving the differential system") {
  auto& p = ode_problem();
  auto res = solve_coupled_ode(ode_system(), p.rhs, p.ivs, p.order_start, p.targets);
  REQUIRE_MESSAGE(res.coupled.status == Status::Solved, res.coupled.reason);
  // every boundary equation involves I(0), which is not supplied
  CHECK(res.boundary_checked == 0);
  auto printed = printed_coupled();
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 2; ++j)
      CHECK(pointwise_equal(res.coupled.expansions[c].at(-3 + j), seq(printed[c][j]), 1, 20).equal);
}

TEST_CASE("boundary equations of the shipped system") {
  auto cs = ode_to_recurrence(ode_system());
  REQUIRE(cs.boundary.size() == 6);
  for (auto& be : cs.boundary) CHECK(be.index <= 1);
  // the x^0 equations force I(0) = 0; the x^1 equations then disagree with the supplied rhs
  auto printed = printed_coupled();
  ValueLookup lookup = [&printed](int comp, long idx) -> std::optional<QSeries> {
    QSeries s{-3, {}};
    for (int j = 0; j < 2; ++j) s.c.push_back(idx == 0 ? Q(0) : seq(printed[comp][j]).evaluate(idx));
    return s;
  };
  try {
    check_boundary(cs, ode_problem().rhs, lookup);
    FAIL("no exception");
  } catch (const BoundaryInconsistent& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("boundary equations reject inconsistent values") {
  // Ihat'/(1-x) = rhat with rhat(N) = 1: I(1) = 1, I(N) = 0 for N >= 2
  CoupledDifferentialSystem h{{{{rf("0")}}, {{rf("1/(1-x)")}}}};
  auto cs = ode_to_recurrence(h);
  REQUIRE(cs.boundary.size() == 1);
  CHECK(cs.boundary[0].index == 0);
  std::vector<LaurentExpansion> rhat = {{0, {seq("1")}}};
  auto lookup = [](Q one) -> ValueLookup {
    return [one](int, long idx) -> std::optional<QSeries> { return QSeries{0, {idx == 1 ? one : Q(0)}}; };
  };
  CHECK(check_boundary(cs, rhat, lookup(Q(1))) == 1);
  CHECK_THROWS_AS(check_boundary(cs, rhat, lookup(Q(2))), BoundaryInconsistent);
  auto res = solve_coupled_ode(h, rhat, {{0, 0, 1, 1}}, 0, {0});
  REQUIRE_MESSAGE(res.coupled.status == Status::Solved, res.coupled.reason);
  CHECK(res.boundary_checked == 1);
  for (long n = 2; n <= 10; ++n) CHECK(res.coupled.expansions[0].at(0).evaluate(n) == 0);
}
