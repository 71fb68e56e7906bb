#include <doctest.h>

#include <cstdlib>

#include "nestsolve/errors.hpp"
#include "nestsolve/verify.hpp"
#include "planted.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

TEST_CASE("unrolling scalar recurrences") {
  auto fib = unroll(ops({"-1", "-1", "1"}), [](long) { return Q(0); }, 0, {Q(0), Q(1)}, 10);
  REQUIRE(fib.size() == 11);
  CHECK(fib[10] == 55);
  auto fact = unroll(ops({"-(N+1)", "1"}), [](long) { return Q(0); }, 0, {Q(1)}, 5);
  CHECK(fact[5] == 120);
  // y(n+1) - y(n) = 1/(n+1) gives the harmonic numbers
  auto h = unroll(ops({"-1", "1"}), [](long n) { return Q(1, n + 1); }, 0, {Q(0)}, 12);
  CHECK(compare_values(seq("S[1](N)"), h, 0).equal);
  CHECK_THROWS_AS(unroll(ops({"0"}), [](long) { return Q(0); }, 0, {}, 3), Error);
}

TEST_CASE("singular leading coefficient") {
  try {
    unroll(ops({"1", "N-3"}), [](long) { return Q(0); }, 0, {Q(1)}, 10);
    FAIL("no exception");
  } catch (const SingularLeading& e) {
    CHECK(e.index == 3);
  }
  CHECK_THROWS_AS(unroll_eps(ops({"1", "N-2"}), {0, {}}, 0, {QSeries{0, {Q(1)}}}, 5, 0), SingularLeading);
  CHECK(regular_from(ops({"1", "N-3"})) == 4);
  CHECK(regular_from(ops({"1/(N-5)", "1"})) == 6);
  CHECK(regular_from(ops({"1", "N+eps"})) == 0);
}

TEST_CASE("unrolling with eps-series values") {
  // (1-eps) y(n+1) = y(n), y(0) = 1: y(n) = (1-eps)^-n
  auto v = unroll_eps(ops({"-1", "1-eps"}), {0, {}}, 0, {QSeries{0, {Q(1), Q(0), Q(0), Q(0)}}}, 3, 3);
  REQUIRE(v.size() == 4);
  CHECK(v[3].start == 0);
  CHECK(v[3].c == std::vector<Q>{1, 3, 6, 10});

  // the eps-recurrence reproduces its leading coefficient
  std::vector<QSeries> init = {{-3, {5, Q(-163, 12)}}, {-3, {Q(130, 27), Q(-695, 54)}}, {-3, {Q(169, 36), Q(-395, 32)}}};
  auto w = unroll_eps(eps_rec_op(), eps_rec_rhs(), 1, init, 20, -2);
  REQUIRE(w.size() == 20);
  Sequence lead = seq(simple_rec_solution());
  for (long n = 1; n <= 20; ++n) {
    CHECK(w[n - 1].start == -3);
    CHECK(w[n - 1].at(-3) == lead.evaluate(n));
  }
}

TEST_CASE("unrolling a diagonal system matches the scalar unroll") {
  Matrix<RatFun> a0 = {{rf("-(N+1)"), rf("0")}, {rf("0"), rf("-1")}};
  Matrix<RatFun> a1 = {{rf("1"), rf("0")}, {rf("0"), rf("1")}};
  std::vector<LaurentExpansion> rhs = {{0, {}}, {0, {seq("1/(N+1)")}}};
  auto v = unroll_system({a0, a1}, rhs, 0, {{QSeries{0, {Q(1)}}, QSeries{0, {Q(0)}}}}, 8, 0);
  REQUIRE(v.size() == 9);
  auto fact = unroll(ops({"-(N+1)", "1"}), [](long) { return Q(0); }, 0, {Q(1)}, 8);
  for (long n = 0; n <= 8; ++n) {
    CHECK(v[n][0].at(0) == fact[n]);
    CHECK(v[n][1].at(0) == seq("S[1](N)").evaluate(n));
  }
  Matrix<RatFun> sing = {{rf("N-2"), rf("0")}, {rf("0"), rf("1")}};
  CHECK_THROWS_AS(unroll_system({a0, sing}, rhs, 0, {{QSeries{0, {Q(1)}}, QSeries{0, {Q(0)}}}}, 8, 0),
                  SingularLeading);
}

TEST_CASE("pointwise comparison reports the first counterexample") {
  auto c = pointwise_equal(seq("S[1](N)"), seq("S[2](N)"), 1, 10);
  CHECK_FALSE(c.equal);
  CHECK(c.index == 2);
  CHECK(c.lhs == Q(3, 2));
  CHECK(c.rhs == Q(5, 4));
  CHECK(pointwise_equal(seq("S[1,1](N)"), seq("(S[1](N)^2 + S[2](N))/2"), 0, 30).equal);
  std::vector<Q> ref = {Q(0), Q(1), Q(3, 2), Q(2)};
  auto d = compare_values(seq("S[1](N)"), ref, 0);
  CHECK_FALSE(d.equal);
  CHECK(d.index == 3);
}

TEST_CASE("parallel kernels agree with their serial references") {
  Rng r(71);
  std::vector<Sequence> pool = {seq(simple_rec_solution()), seq(printed_c_minus2()), seq("S[2,1](N) - 2^N/(N+1)"),
                                seq("S[-1](N)*S[1](N)")};
  for (int it = 0; it < 4; ++it) pool.push_back(nice_sequence(r));
  std::vector<long> points;
  for (int i = 0; i < 60; ++i) points.push_back(r.between(1, 80));
  for (auto& s : pool) {
    CHECK(evaluate_points(s, points) == evaluate_points_serial(s, points));
    for (auto& t : pool) {
      auto a = pointwise_equal(s, t, 1, 40), b = pointwise_equal_serial(s, t, 1, 40);
      CHECK(a.equal == b.equal);
      CHECK(a.index == b.index);
    }
  }
  for (int it = 0; it < 6; ++it) {
    auto p = planted_recurrence(r, static_cast<int>(r.between(1, 3)));
    int d = op_order(p.op);
    long lo = 3, hi = 60;
    auto y = p.solution.evaluate_range(lo, hi + d);
    auto rv = p.rhs.evaluate_range(lo, hi);
    y[r.between(0, static_cast<long>(y.size()) - 1)] += 1;
    CHECK(residuals(p.op, y, rv, lo, hi) == residuals_serial(p.op, y, rv, lo, hi));
  }
}

TEST_CASE("check window from the environment") {
  unsetenv("NESTSOLVE_CHECK_WINDOW");
  CHECK(default_check_window() == kDefaultCheckWindow);
  setenv("NESTSOLVE_CHECK_WINDOW", "7", 1);
  CHECK(default_check_window() == 7);
  setenv("NESTSOLVE_CHECK_WINDOW", "zero", 1);
  CHECK(default_check_window() == kDefaultCheckWindow);
  setenv("NESTSOLVE_CHECK_WINDOW", "-4", 1);
  CHECK(default_check_window() == kDefaultCheckWindow);
  unsetenv("NESTSOLVE_CHECK_WINDOW");
}
