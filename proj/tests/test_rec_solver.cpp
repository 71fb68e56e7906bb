#include <doctest.h>

#include "nestsolve/errors.hpp"
#include "nestsolve/rec_solver.hpp"
#include "planted.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

namespace {

// a_0 y(n) + ... + a_d y(n+d) == 0 for n in lo..hi
bool annihilates(const OpCoeffs& a, const Sequence& y, long lo, long hi) {
  int d = op_order(a);
  auto v = y.evaluate_range(lo, hi + d);
  std::vector<Q> zero(hi - lo + 1);
  auto res = residuals(a, v, zero, lo, hi);
  for (auto& q : res)
    if (q != 0) return false;
  return true;
}

std::vector<InitialValue> values_of(const Sequence& y, long lo, long hi) {
  std::vector<InitialValue> out;
  auto v = y.evaluate_range(lo, hi);
  for (long n = lo; n <= hi; ++n) out.push_back({n, v[n - lo]});
  return out;
}

RecurrenceEquation simple_rec() { return {simple_rec_op(), seq(simple_rec_rhs()), 0}; }

}  // namespace

TEST_CASE("polynomial solutions") {
  auto p = polynomial_solutions(ops({"-1", "1"}));
  REQUIRE(p.size() == 1);
  CHECK(p[0].is_const());
  p = polynomial_solutions(ops({"1", "-2", "1"}));
  CHECK(p.size() == 2);
  for (auto& q : p) CHECK(annihilates(ops({"1", "-2", "1"}), Sequence::rational(RatFun(q)), 0, 10));
  CHECK(polynomial_solutions(ops({"-2", "1"})).empty());
  // (N+1) y(N+1) - (N+2) y(N) = 0 has y = N+1
  p = polynomial_solutions(ops({"-(N+2)", "N+1"}));
  REQUIRE(p.size() == 1);
  CHECK(p[0].deg(NV) == 1);
  CHECK(p[0].eval_N(Q(-1)) == 0);
}

TEST_CASE("hypergeometric solutions") {
  auto h = hypergeometric_solutions(ops({"-2", "1"}));
  REQUIRE(h.size() == 1);
  CHECK(h[0] == RatFun(2));
  h = hypergeometric_solutions(ops({"-1", "N+1"}));
  REQUIRE(h.size() == 1);
  CHECK(h[0] == rf("1/(N+1)"));
  h = hypergeometric_solutions(simple_rec_op());
  for (auto& r : h) CHECK(apply_to_hypergeometric(simple_rec_op(), r).is_zero());
  CHECK_FALSE(h.empty());
  CHECK(hypergeometric_solutions(ops({"-1", "-(N+1)", "1"})).empty());
}

TEST_CASE("hypergeometric kernel agrees with its serial reference") {
  std::vector<OpCoeffs> cases = {simple_rec_op(), ops({"-2", "1"}), ops({"1", "-2", "1"}),
                                 ops({"(N+1)*(N+2)*(2*N+1)", "0", "-(N+5)*(N+6)*(2*N+3)"}),
                                 ops({"-1", "-(N+1)", "1"})};
  Rng r(31);
  for (int it = 0; it < 6; ++it) cases.push_back(planted_recurrence(r, static_cast<int>(r.between(1, 3))).op);
  for (auto& a : cases) CHECK(hypergeometric_solutions(a) == hypergeometric_solutions_serial(a));
}

TEST_CASE("d'Alembertian factorization") {
  auto f = factor_dalembert(simple_rec_op());
  CHECK(f.full());
  CHECK(f.chain_length() == 3);
  CHECK(f.basis.size() == 3);
  for (auto& b : f.basis) CHECK(annihilates(simple_rec_op(), b, 1, 26));
  f = factor_dalembert(ops({"-2", "1"}));
  CHECK(f.chain_length() == 1);
  f = factor_dalembert(ops({"-1", "-(N+1)", "1"}));
  CHECK_FALSE(f.full());
  CHECK(f.chain_length() == 0);
  CHECK(op_order(f.remainder) == 2);
}

TEST_CASE("particular solutions") {
  auto f = factor_dalembert(simple_rec_op());
  Sequence p = particular_solution(f, seq(simple_rec_rhs()));
  Sequence printed = seq("2*(N^2+N-1)/(3*(N+1)^2) - 2*(N+2)*S[1](N)/(3*(N+1))");
  CHECK(apply_operator(simple_rec_op(), p).same(seq(simple_rec_rhs())));
  CHECK(apply_operator(simple_rec_op(), printed).same(seq(simple_rec_rhs())));
  CHECK(annihilates(simple_rec_op(), p - printed, 1, 26));

  auto g = factor_dalembert(ops({"-1", "1"}));
  Sequence h = particular_solution(g, seq("1/(N+1)"));
  auto d = (h - seq("S[1](N)")).evaluate_range(0, 10);
  for (auto& q : d) CHECK(q == d[0]);
  CHECK(particular_solution(g, Sequence()).is_zero());
  CHECK_THROWS_AS(particular_solution(factor_dalembert(ops({"-1", "-(N+1)", "1"})), seq("1")), NotFactorized);
}

TEST_CASE("solving the printed third-order recurrence") {
  auto eq = simple_rec();
  Decision d = solve_recurrence(eq, {{1, 5}, {2, Q(130, 27)}, {3, Q(169, 36)}});
  REQUIRE(d.status == Status::Solved);
  CHECK(d.solution.same(seq(simple_rec_solution())));
  CHECK(d.constants.size() == 3);
  CHECK(d.chain_length == 3);
  CHECK(d.order == 3);
  CHECK(d.mu == 0);
  CHECK(d.window == std::vector<long>{1, 2, 3});
  CHECK(d.verified_to >= 3 + kDefaultCheckWindow);
}

TEST_CASE("small recurrences") {
  Decision d = solve_recurrence({ops({"-1", "1"}), Sequence(), 0}, {{0, 7}});
  REQUIRE(d.status == Status::Solved);
  CHECK(d.solution.same(seq("7")));

  d = solve_recurrence({ops({"N+1"}), seq("S[1](N)"), 0}, {});
  REQUIRE(d.status == Status::Solved);
  CHECK(d.solution.same(seq("S[1](N)/(N+1)")));

  // trailing zero coefficient: y(N+2) = y(N+1)
  d = solve_recurrence({ops({"0", "-1", "1"}), Sequence(), 0}, {{1, 3}, {2, 3}});
  REQUIRE(d.status == Status::Solved);
  CHECK(d.solution.evaluate(9) == 3);

  // y(N+1) = y(N)/(N+1), y(0) = 1
  d = solve_recurrence({ops({"-1", "N+1"}), Sequence(), 0}, {{0, 1}});
  REQUIRE(d.status == Status::Solved);
  CHECK(d.solution.evaluate(5) == Q(1, 120));
}

TEST_CASE("decisions that are not Solved") {
  Decision d = solve_recurrence({ops({"-1", "1"}), Sequence(), 0}, {{0, 1}, {1, 2}});
  CHECK(d.status == Status::NotNestedSum);
  CHECK(d.reason.find("N=1") != std::string::npos);

  d = solve_recurrence({ops({"-1", "-(N+1)", "1"}), Sequence(), 0}, {{0, 1}, {1, 1}});
  CHECK(d.status == Status::Inconclusive);

  CHECK_THROWS_AS(solve_recurrence(simple_rec(), {{1, 5}, {2, Q(130, 27)}}), InsufficientInitialValues);
  CHECK_THROWS_AS(solve_recurrence(simple_rec(), {{1, 5}, {1, 6}, {2, 1}, {3, 1}}), Error);
}

TEST_CASE("basis elements satisfy the homogeneous recurrence") {
  Rng r(32);
  for (int it = 0; it < 15; ++it) {
    auto p = planted_recurrence(r, static_cast<int>(r.between(1, 3)));
    auto f = factor_dalembert(p.op);
    RecurrenceEquation eq{p.op, p.rhs, 0};
    auto sp = solution_space(eq, f);
    for (auto& b : sp.basis) CHECK(annihilates(p.op, b, sp.mu, sp.mu + 25));
  }
}

TEST_CASE("Casoratian of the basis has full rank") {
  Rng r(33);
  for (int it = 0; it < 15; ++it) {
    int d = static_cast<int>(r.between(1, 3));
    auto p = planted_recurrence(r, d);
    auto f = factor_dalembert(p.op);
    REQUIRE(f.full());
    auto sp = solution_space({p.op, p.rhs, 0}, f);
    REQUIRE(static_cast<int>(sp.basis.size()) == d);
    Matrix<Q> cas(d, std::vector<Q>(d));
    for (int j = 0; j < d; ++j) {
      auto v = sp.basis[j].evaluate_range(sp.mu, sp.mu + d - 1);
      for (int i = 0; i < d; ++i) cas[i][j] = v[i];
    }
    CHECK(rank(cas, d) == d);
  }
}

TEST_CASE("planted recurrences are recovered") {
  Rng r(34);
  for (int it = 0; it < 20; ++it) {
    int d = static_cast<int>(r.between(1, 3));
    auto p = planted_recurrence(r, d);
    RecurrenceEquation eq{p.op, p.rhs, 0};
    Decision dec = solve_recurrence(eq, values_of(p.solution, 0, 12));
    REQUIRE_MESSAGE(dec.status == Status::Solved, op_str(p.op), " ", p.solution.str(), " ", dec.reason);
    CHECK(pointwise_equal(dec.solution, p.solution, dec.mu, dec.mu + 30).equal);
    // reproduces its initial values and the unrolled recurrence
    for (long n : dec.window) CHECK(dec.solution.evaluate(n) == p.solution.evaluate(n));
    std::vector<Q> init;
    for (long n : dec.window) init.push_back(p.solution.evaluate(n));
    long start = dec.window.front();
    auto rv = p.rhs.evaluate_range(start, start + 20);
    auto ref = unroll(p.op, [&](long n) { return rv[n - start]; }, start, init, start + 20);
    CHECK(compare_values(dec.solution, ref, start).equal);
  }
}

TEST_CASE("chain length does not depend on a rational multiplier") {
  Rng r(35);
  for (int it = 0; it < 10; ++it) {
    auto p = planted_recurrence(r, static_cast<int>(r.between(1, 3)));
    OpCoeffs scaled = p.op;
    RatFun m = rf("(N+3)/(2*N+5)") * RatFun(r.nonzero(-4, 4));
    for (auto& c : scaled) c *= m;
    CHECK(factor_dalembert(scaled).chain_length() == factor_dalembert(p.op).chain_length());
  }
}
