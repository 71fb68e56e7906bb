#include <doctest.h>

#include "nestsolve/errors.hpp"
#include "nestsolve/sequence.hpp"
#include "support.hpp"

using namespace nestsolve;
using namespace nestsolve::testing;

namespace {

CanonicalForm canon(const std::string& s) {
  auto c = canonicalize(ex(s));
  REQUIRE(c);
  return *c;
}

Expr random_expr(Rng& r, int depth) {
  long pick = r.between(0, depth > 0 ? 6 : 2);
  switch (pick) {
    case 0:
      return Expr::rat(RatFun(r.poly_n(2, 4), Poly::var(NV) + Poly(r.between(1, 3))));
    case 1:
      return Expr::harmonic(r.word(3));
    case 2:
      return Expr::rat(RatFun(r.poly_n(1, 5)));
    case 3:
      return Expr::sum(r.between(1, 2), random_expr(r, depth - 1));
    case 4: {
      RatFun q = r.between(0, 1) ? RatFun(Poly::var(NV) + Poly(r.between(1, 3)), Poly::var(NV) + Poly(r.between(1, 3)))
                                 : RatFun(qq(r.nonzero(-2, 2), r.between(1, 2)));
      return Expr::prod(1, q);
    }
    case 5:
      return random_expr(r, depth - 1) + random_expr(r, depth - 1);
    default:
      return random_expr(r, depth - 1) * random_expr(r, depth - 1);
  }
}

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(evaluate(ex("S[1](N)"), 3) == Q(11, 6));
  CHECK(evaluate(ex(simple_rec_solution()), 1) == 5);
  CHECK(evaluate(ex(simple_rec_solution()), 3) == Q(169, 36));
  CHECK(evaluate(ex("S[-2](N)"), 2) == Q(-3, 4));
  CHECK(evaluate(ex("Prod(k,1,N,k)"), 5) == 120);
  CHECK(evaluate(ex("Sum(i,1,N,Sum(j,1,i,1/j))"), 3) == 1 + Q(3, 2) + Q(11, 6));
  CHECK(evaluate(ex("S[{1,1/2}](N)"), 2) == Q(1, 2) + Q(1, 8));
  CHECK(evaluate(ex("2^N*S[1](N+1)"), 2) == 4 * (1 + Q(1, 2) + Q(1, 3)));
}

TEST_CASE("shift examples") {
  CHECK(*canonicalize(shift(ex("S[1](N)"), 1)) == canon("S[1](N) + 1/(N+1)"));
  CHECK(*canonicalize(shift(ex("S[2](N)"), 2)) == canon("S[2](N) + 1/(N+1)^2 + 1/(N+2)^2"));
  CHECK(shift_word(word_from_indices({1}), 1) == canon("S[1](N) + 1/(N+1)"));
}

TEST_CASE("quasi-shuffle products") {
  CHECK(quasi_shuffle_product(word_from_indices({3}), {}) == CanonicalForm::harmonic(word_from_indices({3})));
  CHECK(quasi_shuffle_product(word_from_indices({1}), word_from_indices({1})) == canon("2*S[1,1](N) - S[2](N)"));
  auto m = quasi_shuffle(word_from_indices({1}), word_from_indices({2}));
  CHECK(m.size() == 3);
  CHECK(m[word_from_indices({1, 2})] == 1);
  CHECK(m[word_from_indices({2, 1})] == 1);
  CHECK(m[word_from_indices({3})] == -1);
}

TEST_CASE("canonicalization examples") {
  CHECK(canon("-Sum(i,1,N,Sum(j,1,i,1/(j*(1+j))))/(N+1)") == canon("1/(N+1)^2 + S[1](N)/(N+1) - 1"));
  CHECK(canon("-Sum(i,1,N,1)/(N+1)") == canon("-N/(N+1)"));
  CHECK(canon("(2*N+1)/(N*(N+1))") == CanonicalForm::rational(rf("(2*N+1)/(N*(N+1))")));
  CHECK(canon("S[1](N)^2") == canon("2*S[1,1](N) - S[2](N)"));
  CHECK(canon("Sum(k,1,N,1/(k*(k+1)))") == canon("N/(N+1)"));
  CHECK(canon("Sum(k,3,N,1/k)") == canon("S[1](N) - 3/2"));
}

TEST_CASE("harmonic sum detection") {
  auto w = detect_harmonic(ex("Sum(i,1,N,1/i)"));
  REQUIRE(w);
  CHECK(*w == word_from_indices({1}));
  w = detect_harmonic(ex("Sum(i,1,N,(-1)^i/i^2)"));
  REQUIRE(w);
  CHECK(*w == word_from_indices({-2}));
  w = detect_harmonic(ex("Sum(i,1,N,S[1](i)/i^3)"));
  REQUIRE(w);
  CHECK(*w == word_from_indices({3, 1}));
  CHECK_FALSE(detect_harmonic(ex("Sum(i,1,N,i)")));
}

TEST_CASE("basis sums stay distinct") {
  auto a = canon("S[1](N)^2"), b = canon("S[2](N)"), c = canon("S[1,1](N)");
  CHECK(a != b);
  CHECK(b != c);
  CHECK(a != c);
}

TEST_CASE("random expressions: shift, canonicalization and idempotence") {
  Rng r(21);
  int canonical = 0;
  for (int it = 0; it < 120; ++it) {
    Expr e = random_expr(r, 3);
    long v = e.valid_from();
    if (v > 20) continue;
    long k = r.between(0, 4);
    Expr s = shift(e, k);
    auto base = evaluate_range(e, v, 20 + k);
    long sv = std::max(v, s.valid_from());
    CHECK(sv <= v + k + 1);
    auto shifted = evaluate_range(s, sv, 20);
    for (long n = sv; n <= 20; ++n) CHECK_MESSAGE(shifted[n - sv] == base[n + k - v], e.str(), " k=", k, " n=", n);

    auto c = canonicalize(e);
    if (!c) continue;
    ++canonical;
    long cv = std::max(v, c->valid_from());
    if (cv > 20) continue;
    auto cvals = c->evaluate_range(cv, 20);
    for (long n = cv; n <= 20; ++n) CHECK(cvals[n - cv] == base[n - v]);
    auto again = canonicalize(c->to_expr());
    REQUIRE(again);
    CHECK(*again == *c);
  }
  CHECK(canonical > 80);
}

TEST_CASE("quasi-shuffle and shift identities for random words") {
  Rng r(22);
  for (int it = 0; it < 40; ++it) {
    Word u = r.word(2), v = r.word(2);
    auto p = quasi_shuffle_product(u, v);
    auto su = harmonic_values(u, 15), sv = harmonic_values(v, 15);
    auto pv = p.evaluate_range(0, 15);
    for (int n = 0; n <= 15; ++n) CHECK(pv[n] == su[n] * sv[n]);
    long s = r.between(1, 3);
    auto sh = shift_word(u, s).evaluate_range(0, 12);
    auto full = harmonic_values(u, 12 + s);
    for (int n = 0; n <= 12; ++n) CHECK(sh[n] == full[n + s]);
  }
}

TEST_CASE("sum expression strings round-trip") {
  for (const char* s : {simple_rec_solution(), printed_c_minus2(), "Sum(k,0,N,-4*(k+3)/(3*(k+2)))",
                        "Prod(k,1,N,(k+1)/(k+3))*S[-1,2](N)", "S[{2,1/3},1](N)/(N+2)", "3^N*S[1](N)"}) {
    Expr e = ex(s);
    Expr back = ex(e.str());
    CHECK(evaluate_range(back, 1, 12) == evaluate_range(e, 1, 12));
    CHECK(back.str() == e.str());
  }
}

TEST_CASE("parse errors report positions") {
  try {
    ex("1/(N+");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.pos == 5);
  }
  CHECK_THROWS_AS(ex("S[0](N)"), ParseError);
  CHECK_THROWS_AS(ex("Sum(k,1,M,k)"), ParseError);
  CHECK_THROWS_AS(ex("foo"), ParseError);
}

TEST_CASE("sequences") {
  Sequence a = seq("S[1](N)"), b = seq("1/(N+1)");
  CHECK((a.shift(1) - a - b).is_zero());
  CHECK((a * a).same(seq("2*S[1,1](N) - S[2](N)")));
  CHECK(seq(simple_rec_solution()).evaluate(2) == Q(130, 27));
}

TEST_CASE("sums whose poles telescope off the integers") {
  CHECK(canon("Sum(k,1,N,1/(4*k+1) - 1/(4*k+5))") == canon("1/5 - 1/(4*N+5)"));
  CHECK(canon("Sum(k,1,N,2*2^k/(2*k+3) - 2^k/(2*k+1))") == canon("2*2^N/(2*N+3) - 2/3"));
  CHECK(canon("Sum(k,1,N,1/((k+1)^2+1) - 1/(k^2+1))") == canon("1/((N+1)^2+1) - 1/2"));
  CHECK(canon("Sum(k,1,N,S[1](k+1)/(2*k+3) - S[1](k)/(2*k+1))") == canon("S[1](N+1)/(2*N+3) - 1/3"));
  CHECK(canon("Prod(k,1,N,(k^2+3*k+3)/(k^2+k+1))") == canon("(N^2+3*N+3)/3"));
  CHECK_FALSE(canonicalize(ex("Sum(k,1,N,1/(2*k+1))")));
  CHECK_FALSE(canonicalize(ex("Sum(k,1,N,1/(k^2+1))")));
}
