#pragma once
#include <string>
#include <vector>

#include "nestsolve/sequence.hpp"

namespace nestsolve {

// sum_i a[i](N) * E^i
using OpCoeffs = std::vector<RatFun>;

int op_order(const OpCoeffs& a);  // -1 for the zero operator
OpCoeffs op_trim(OpCoeffs a);

// polynomial coefficients without common factor, integer-primitive, leading term of a_d positive;
// *multiplier receives m with result = m * a
OpCoeffs normalize_operator(const OpCoeffs& a, RatFun* multiplier = nullptr);

// L = Q o (E - r) + rem
OpCoeffs right_divide(const OpCoeffs& a, const RatFun& r, RatFun* rem = nullptr);
// L applied to a hypergeometric term with y(N+1)/y(N) = r, divided by y(N)
RatFun apply_to_hypergeometric(const OpCoeffs& a, const RatFun& r);

Sequence apply_operator(const OpCoeffs& a, const Sequence& y);
OpCoeffs shift_operator(const OpCoeffs& a, long k);  // coefficients a_i(N+k)

std::string op_str(const OpCoeffs& a, const std::string& fn = "I");

}  // namespace nestsolve
