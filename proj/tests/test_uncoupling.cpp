#include <doctest.h>

#include "nestsolve/errors.hpp"
#include "nestsolve/problem.hpp"
#include "nestsolve/uncoupling.hpp"
#include "planted.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

namespace {

const Problem& coupled_problem() {
  static const Problem p = load_problem(NESTSOLVE_SOURCE_DIR "/problems/coupled-rec.json");
  return p;
}

CoupledSystem coupled_system() {
  CoupledSystem s;
  s.A = coupled_problem().matrices;
  return s;
}

const CoupledResult& coupled_solution() {
  static const CoupledResult r = [] {
    auto& p = coupled_problem();
    return solve_coupled(coupled_system(), p.rhs, p.ivs, p.order_start, p.targets);
  }();
  return r;
}

Matrix<RatFun> diag(const std::vector<RatFun>& d) {
  int n = static_cast<int>(d.size());
  Matrix<RatFun> m(n, std::vector<RatFun>(n));
  for (int i = 0; i < n; ++i) m[i][i] = d[i];
  return m;
}

}  // namespace

TEST_CASE("companion embedding") {
  CoupledSystem s;
  s.A = {diag({rf("N+1")}), diag({rf("2")}), diag({rf("-1")})};
  auto f = to_first_order(s);
  CHECK(f.size() == 2);
  CHECK(f.order() == 1);
  CoupledSystem one;
  one.A = {diag({rf("1"), rf("N")}), diag({rf("1"), rf("1")})};
  auto g = to_first_order(one);
  CHECK(g.size() == 2);
  CHECK(g.order() == 1);
}

TEST_CASE("the coupled system uncouples to the eps-recurrence operator") {
  auto uf = uncouple(to_first_order(coupled_system()));
  REQUIRE(uf.blocks.size() == 1);
  CHECK(uf.blocks[0].component == 0);
  CHECK(same_up_to_unit(uf.blocks[0].op, normalize_operator(eps_rec_op())));
  CHECK(uf.back.size() == 2);
}

TEST_CASE("diagonal and swap systems") {
  CoupledSystem d;
  d.A = {diag({rf("-2"), rf("-(N+1)/(N+2)"), rf("-1")}), diag({rf("1"), rf("1"), rf("1")})};
  auto uf = uncouple(to_first_order(d));
  REQUIRE(uf.blocks.size() == 3);
  for (auto& b : uf.blocks) CHECK(op_order(b.op) == 1);
  auto plan = analyze(d, {0, 0, 0});
  REQUIRE(plan.pivots.size() == 3);
  for (auto& p : plan.pivots) CHECK(p.initial_values == 1);

  CoupledSystem sw;
  sw.A = {{{rf("0"), rf("-1")}, {rf("-1"), rf("0")}}, diag({rf("1"), rf("1")})};
  uf = uncouple(to_first_order(sw));
  REQUIRE(uf.blocks.size() == 1);
  CHECK(same_up_to_unit(uf.blocks[0].op, ops({"-1", "0", "1"})));
  REQUIRE(uf.back.size() == 1);
  CHECK(uf.back[0].component == 1);
}

TEST_CASE("order analysis of the coupled system") {
  auto plan = analyze(coupled_system(), {-2, -2, -2});
  REQUIRE(plan.pivots.size() == 1);
  CHECK(plan.pivots[0].component == 0);
  CHECK(plan.pivots[0].initial_values == 3);
  CHECK(plan.pivots[0].nu == -2);
  CHECK(plan.rhs_depth == std::vector<std::optional<int>>{-2, -2, -2});
  CHECK(plan.unresolved.empty());
}

TEST_CASE("recipes") {
  Recipe a{{TermKey{Source::Pivot, 0, 1}, rf("N")}}, b{{TermKey{Source::Pivot, 0, 1}, rf("-N")}};
  CHECK(recipe_add(a, b).empty());
  auto s = recipe_shift(a, 2);
  REQUIRE(s.size() == 1);
  CHECK(s.begin()->first.shift == 3);
  CHECK(s.begin()->second == rf("N+2"));
  CHECK(recipe_scale(a, RatFun(0)).empty());
  LaurentExpansion piv{0, {seq("S[1](N)")}};
  auto e = instantiate(a, {}, {{0, piv}}, 0, 0);
  CHECK(e.at(0).same(seq("N*S[1](N+1)")));
}

TEST_CASE("solving the coupled system") {
  auto& res = coupled_solution();
  REQUIRE(res.status == Status::Solved);
  auto printed = printed_coupled();
  REQUIRE(res.expansions.size() == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(res.expansions[c].start == -3);
    for (int j = 0; j < 2; ++j)
      CHECK_MESSAGE(pointwise_equal(res.expansions[c].at(-3 + j), seq(printed[c][j]), 1, 20).equal, c, " ", j);
  }
  CHECK(res.expansions[1].at(-3).same(seq("4/3")));
  CHECK(res.expansions[1].at(-2).same(seq("-2")));
  CHECK(res.verified_to > res.checked_from);
  auto& p = coupled_problem();
  CHECK(coupled_substitution_check(coupled_system(), p.rhs, res.expansions, 1, 25));
}

TEST_CASE("coupled solution agrees with unrolling the system") {
  auto& res = coupled_solution();
  REQUIRE(res.status == Status::Solved);
  long start = 1;
  std::vector<std::vector<QSeries>> init(1);
  for (int c = 0; c < 3; ++c) {
    QSeries q{-3, {}};
    for (int j = -3; j <= -2; ++j) q.c.push_back(res.expansions[c].at(j).evaluate(start));
    init[0].push_back(q);
  }
  auto vals = unroll_system(coupled_system().A, coupled_problem().rhs, start, init, start + 15, -2);
  int compared = 0;
  for (std::size_t t = 0; t < vals.size(); ++t)
    for (int c = 0; c < 3; ++c)
      for (int j = vals[t][c].start; j <= vals[t][c].end(); ++j) {
        CHECK(vals[t][c].at(j) == res.expansions[c].at(j).evaluate(start + static_cast<long>(t)));
        ++compared;
      }
  CHECK(compared > 0);
}

TEST_CASE("a one-component system matches the scalar solver") {
  CoupledSystem s;
  for (auto& a : eps_rec_op()) s.A.push_back({{a}});
  std::vector<ComponentInitialValue> ivs = {{0, -3, 1, 5},           {0, -3, 2, Q(130, 27)},
                                            {0, -3, 3, Q(169, 36)},  {0, -2, 1, Q(-163, 12)},
                                            {0, -2, 2, Q(-695, 54)}, {0, -2, 3, Q(-395, 32)}};
  auto res = solve_coupled(s, {eps_rec_rhs()}, ivs, -3, {-2});
  REQUIRE_MESSAGE(res.status == Status::Solved, res.reason);
  std::vector<EpsInitialValue> eivs;
  for (auto& v : ivs) eivs.push_back({v.order, v.index, v.value});
  auto ref = generate_expansion({eps_rec_op(), eps_rec_rhs(), 0}, eivs, -3, -2);
  REQUIRE(ref.status == Status::Solved);
  for (int j = -3; j <= -2; ++j) CHECK(res.expansions[0].at(j).same(ref.expansion.at(j)));
}

TEST_CASE("row permutation does not change the solution") {
  auto& base = coupled_solution();
  REQUIRE(base.status == Status::Solved);
  auto& p = coupled_problem();
  CoupledSystem s = coupled_system();
  std::vector<int> perm = {2, 0, 1};
  CoupledSystem q;
  for (auto& m : s.A) {
    Matrix<RatFun> pm;
    for (int i : perm) pm.push_back(m[i]);
    q.A.push_back(pm);
  }
  std::vector<LaurentExpansion> rhs;
  for (int i : perm) rhs.push_back(p.rhs[i]);
  auto res = solve_coupled(q, rhs, p.ivs, p.order_start, p.targets);
  REQUIRE(res.status == Status::Solved);
  for (int c = 0; c < 3; ++c)
    for (int j = -3; j <= -2; ++j) CHECK(pointwise_equal(res.expansions[c].at(j), base.expansions[c].at(j), 1, 20).equal);
}

TEST_CASE("missing initial values and shallow rhs") {
  auto& p = coupled_problem();
  auto ivs = p.ivs;
  ivs.pop_back();
  CHECK_THROWS_AS(solve_coupled(coupled_system(), p.rhs, ivs, p.order_start, p.targets), InsufficientInitialValues);
  auto rhs = p.rhs;
  rhs[1].coeffs.pop_back();
  CHECK_THROWS_AS(solve_coupled(coupled_system(), rhs, p.ivs, p.order_start, p.targets), RhsTooShallow);
}

TEST_CASE("planted coupled systems are recovered") {
  Rng r(51);
  for (int it = 0; it < 6; ++it) {
    int n = static_cast<int>(r.between(2, 3));
    auto ps = planted_system(r, n, 1);
    auto ivs = planted_values(ps.solution, 0, 8);
    auto res = solve_coupled(ps.sys, ps.rhs, ivs, 0, std::vector<int>(n, 1));
    REQUIRE_MESSAGE(res.status == Status::Solved, res.reason);
    long lo = std::max(9L, res.checked_from);
    for (int c = 0; c < n; ++c)
      for (int j = 0; j <= 1; ++j) CHECK(pointwise_equal(res.expansions[c].at(j), ps.solution[c].at(j), lo, lo + 15).equal);
  }
}
