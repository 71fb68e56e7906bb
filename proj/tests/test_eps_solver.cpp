#include <doctest.h>

#include "nestsolve/eps_solver.hpp"
#include "nestsolve/errors.hpp"
#include "planted.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

namespace {

EpsRecurrence eps_rec() { return {eps_rec_op(), eps_rec_rhs(), 0}; }

std::vector<EpsInitialValue> eps_rec_values() {
  return {{-3, 1, 5},           {-3, 2, Q(130, 27)},  {-3, 3, Q(169, 36)},
          {-2, 1, Q(-163, 12)}, {-2, 2, Q(-695, 54)}, {-2, 3, Q(-395, 32)}};
}

std::vector<EpsInitialValue> shifted(std::vector<EpsInitialValue> v, int s) {
  for (auto& x : v) x.order += s;
  return v;
}

}  // namespace

TEST_CASE("epsilon normalization") {
  int s = 99;
  normalize_epsilon({ops({"1/eps", "1"}), {}, 0}, &s);
  CHECK(s == 1);
  auto n = normalize_epsilon({ops({"eps^2", "eps^3"}), {0, {seq("1")}}, 0}, &s);
  CHECK(s == -2);
  CHECK(n.coeffs[0] == RatFun(1));
  CHECK(n.rhs.start == -2);
  normalize_epsilon(eps_rec(), &s);
  CHECK(s == 0);
  CHECK_THROWS_AS(normalize_epsilon({ops({"0", "0"}), {}, 0}, &s), Error);
}

TEST_CASE("constant-term recurrence of the eps-recurrence") {
  int s;
  auto ne = normalize_epsilon(eps_rec(), &s);
  auto base = constant_term_recurrence(ne, -3);
  REQUIRE(base.coeffs.size() == 4);
  auto ref = simple_rec_op();
  for (int i = 0; i < 4; ++i) CHECK(base.coeffs[i] == ref[i]);
  CHECK(base.rhs.same(seq(simple_rec_rhs())));
}

TEST_CASE("operator expansion in eps") {
  auto e = expand_operator(eps_rec_op(), 2);
  REQUIRE(e.size() == 2);
  CHECK(e[0][0] == rf("-2*(N+1)*(N+2)^2"));
  CHECK(e[1][0] == rf("-2*(N+1)*(N+2)"));
  CHECK(e[1][3] == rf("(N+2)*(2*N+8) - (N+4)*(2*N+8) + (N+2)*(N+4)"));
  CHECK_THROWS_AS(expand_operator(ops({"1/eps", "1"}), 1), PoleAtZero);
}

TEST_CASE("expansion of the printed eps-recurrence") {
  auto res = generate_expansion(eps_rec(), eps_rec_values(), -3, -2);
  REQUIRE(res.status == Status::Solved);
  CHECK(res.s == 0);
  CHECK(res.expansion.start == -3);
  REQUIRE(res.expansion.coeffs.size() == 2);
  CHECK(res.expansion.at(-3).same(seq(simple_rec_solution())));
  auto c2 = res.expansion.at(-2);
  CHECK(c2.evaluate(1) == Q(-163, 12));
  CHECK(c2.evaluate(2) == Q(-695, 54));
  CHECK(c2.evaluate(3) == Q(-395, 32));
  CHECK(res.orders.size() == 2);
  CHECK(res.demand == 3);
  CHECK(res.verified_to >= kDefaultCheckWindow);

  // C_-2 solves the peeled recurrence
  auto ex2 = expand_operator(eps_rec_op(), 2);
  LaurentExpansion known{-3, {res.expansion.at(-3)}};
  Sequence r = peel_rhs(ex2, eps_rec_rhs(), known, -2);
  CHECK(apply_operator(ex2[0], c2).same(r));
}

TEST_CASE("single-order window") {
  auto res = generate_expansion(eps_rec(), eps_rec_values(), -3, -3);
  REQUIRE(res.status == Status::Solved);
  REQUIRE(res.expansion.coeffs.size() == 1);
  CHECK(res.expansion.at(-3).same(seq(simple_rec_solution())));
}

TEST_CASE("eps^s bookkeeping") {
  auto base = generate_expansion(eps_rec(), eps_rec_values(), -3, -2);
  REQUIRE(base.status == Status::Solved);
  for (int s : {-2, 1, 3}) {
    EpsRecurrence scaled = eps_rec();
    scaled.rhs = scaled.rhs.scaled_order(s);
    auto res = generate_expansion(scaled, shifted(eps_rec_values(), s), -3 + s, -2 + s);
    REQUIRE(res.status == Status::Solved);
    CHECK(res.expansion.start == -3 + s);
    for (int j = 0; j < 2; ++j) CHECK(res.expansion.coeffs[j].same(base.expansion.coeffs[j]));
  }
  // multiplying both sides by eps^2 changes nothing
  EpsRecurrence both = eps_rec();
  for (auto& c : both.coeffs) c *= rf("eps^2");
  both.rhs = both.rhs.scaled_order(2);
  auto res = generate_expansion(both, eps_rec_values(), -3, -2);
  REQUIRE(res.status == Status::Solved);
  CHECK(res.s == -2);
  CHECK(res.expansion.str() == base.expansion.str());
}

TEST_CASE("expansion output is deterministic") {
  auto a = generate_expansion(eps_rec(), eps_rec_values(), -3, -2);
  auto b = generate_expansion(eps_rec(), eps_rec_values(), -3, -2);
  CHECK(a.expansion.str() == b.expansion.str());
}

TEST_CASE("substitution check detects a perturbed coefficient") {
  auto res = generate_expansion(eps_rec(), eps_rec_values(), -3, -2);
  REQUIRE(res.status == Status::Solved);
  int s;
  auto ne = normalize_epsilon(eps_rec(), &s);
  CHECK(eps_substitution_check(ne, res.expansion, -2, 0, 20));
  auto bad = res.expansion;
  bad.coeffs[1] = bad.coeffs[1] + seq("N^3");
  long idx = -1;
  CHECK_FALSE(eps_substitution_check(ne, bad, -2, 0, 20, &idx));
  CHECK(idx == 0);
}

TEST_CASE("insufficient inputs") {
  CHECK_THROWS_AS(generate_expansion(eps_rec(), eps_rec_values(), -3, -1), RhsTooShallow);
  auto ivs = eps_rec_values();
  ivs.pop_back();
  try {
    generate_expansion(eps_rec(), ivs, -3, -2);
    FAIL("no exception");
  } catch (const InsufficientInitialValues& e) {
    CHECK(std::string(e.what()).find("order -2") != std::string::npos);
  }
}

TEST_CASE("planted two-order expansions are recovered") {
  Rng r(41);
  for (int it = 0; it < 12; ++it) {
    auto p = planted_recurrence(r, static_cast<int>(r.between(1, 3)));
    OpCoeffs l1(p.op.size());
    for (auto& c : l1) c = RatFun(r.between(-2, 2)) * (RatFun::var(NV) + RatFun(r.between(1, 3)));
    OpCoeffs op(p.op.size());
    for (std::size_t i = 0; i < op.size(); ++i) op[i] = p.op[i] + RatFun::var(EPS) * l1[i];
    Sequence c0 = p.solution, c1 = nice_sequence(r);
    LaurentExpansion rhs{0, {p.rhs, apply_operator(p.op, c1) + apply_operator(l1, c0)}};
    std::vector<EpsInitialValue> ivs;
    for (long n = 0; n <= 10; ++n) {
      ivs.push_back({0, n, c0.evaluate(n)});
      ivs.push_back({1, n, c1.evaluate(n)});
    }
    auto res = generate_expansion({op, rhs, 0}, ivs, 0, 1);
    REQUIRE_MESSAGE(res.status == Status::Solved, op_str(op), " ", res.reason);
    long lo = res.orders[1].mu;
    CHECK(pointwise_equal(res.expansion.at(0), c0, lo, lo + 25).equal);
    CHECK(pointwise_equal(res.expansion.at(1), c1, lo, lo + 25).equal);
  }
}
