#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "nestsolve/laurent.hpp"
#include "nestsolve/linalg.hpp"
#include "nestsolve/operator.hpp"

namespace nestsolve {

constexpr long kDefaultCheckWindow = 15;
// NESTSOLVE_CHECK_WINDOW if set and valid, else the default
long default_check_window();

// I(start..up_to) from sum a_i(n) I(n+i) = r(n); init holds I(start..start+d-1),
// rhs(n) is queried for n = start..up_to-d
std::vector<Q> unroll(const OpCoeffs& a, const std::function<Q(long)>& rhs, long start,
                      const std::vector<Q>& init, long up_to);

// eps-series version: a_i in Q(eps,N), values exact through the order each series reports,
// truncated at cap; an rhs without coefficients is zero
std::vector<QSeries> unroll_eps(const OpCoeffs& a, const LaurentExpansion& rhs, long start,
                                const std::vector<QSeries>& init, long up_to, int cap);

// sum_k A_k(eps,n) I(n+k) = r(n); init[t][i] = I_i(start+t), t < d; result[t][i] = I_i(start+t)
std::vector<std::vector<QSeries>> unroll_system(const std::vector<Matrix<RatFun>>& A,
                                                const std::vector<LaurentExpansion>& rhs, long start,
                                                const std::vector<std::vector<QSeries>>& init, long up_to,
                                                int cap);

// first index from which no coefficient has a pole and a_d does not vanish (eps-free factors)
long regular_from(const OpCoeffs& a);

std::vector<Q> evaluate_points(const Sequence& s, const std::vector<long>& points);
std::vector<Q> evaluate_points_serial(const Sequence& s, const std::vector<long>& points);

struct Comparison {
  bool equal = true;
  long index = -1;  // first counterexample
  Q lhs, rhs;
};
Comparison pointwise_equal(const Sequence& a, const Sequence& b, long lo, long hi);
Comparison pointwise_equal_serial(const Sequence& a, const Sequence& b, long lo, long hi);
Comparison compare_values(const Sequence& a, const std::vector<Q>& ref, long lo);

// r(n) - sum a_i(n) y(n+i) for n = lo..hi; y holds y(lo..hi+d), r holds r(lo..hi)
std::vector<Q> residuals(const OpCoeffs& a, const std::vector<Q>& y, const std::vector<Q>& r, long lo, long hi);
std::vector<Q> residuals_serial(const OpCoeffs& a, const std::vector<Q>& y, const std::vector<Q>& r, long lo,
                                long hi);

}  // namespace nestsolve
