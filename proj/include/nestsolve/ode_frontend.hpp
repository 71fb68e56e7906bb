#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "nestsolve/uncoupling.hpp"

namespace nestsolve {

// sum_k A[k] * D_x^k Ihat(x) = rhat(x), entries in Q(eps,x); Ihat_i = sum_N I_i(N) x^N
struct CoupledDifferentialSystem {
  std::vector<Matrix<RatFun>> A;

  int size() const { return A.empty() ? 0 : static_cast<int>(A[0].size()); }
  int order() const { return static_cast<int>(A.size()) - 1; }
};

// coeff(N) * I(N+shift) contributed to the coefficient of x^N
struct Fragment {
  long shift;
  RatFun coeff;
};

// a polynomial in (eps,x); a * D^k
std::vector<Fragment> term_to_operator(const Poly& a, int k);

struct BoundaryTerm {
  int component;
  long index;
  RatFun coeff;  // in eps only
};

// coefficient of x^index in row `row`, where some shifted arguments are negative
struct BoundaryEquation {
  int row;
  long index;
  std::vector<BoundaryTerm> lhs;
  std::vector<std::pair<long, RatFun>> rhs;  // coeff * rhat_row(m)
};

struct ConvertedSystem {
  CoupledSystem sys;
  std::vector<Recipe> rhs;  // r'_i in terms of shifted rhat coefficients
  std::vector<RatFun> multipliers;
  std::vector<long> row_shift;  // row i at N is the coefficient of x^(N + row_shift[i])
  std::vector<BoundaryEquation> boundary;
};

ConvertedSystem ode_to_recurrence(const CoupledDifferentialSystem& ode);

std::vector<LaurentExpansion> convert_rhs(const ConvertedSystem& cs, const std::vector<LaurentExpansion>& rhat);

// known(component, index) -> series of I_component(index) or nullopt
using ValueLookup = std::function<std::optional<QSeries>(int, long)>;

// throws BoundaryInconsistent(index) on a violated boundary equation; returns the number checked
int check_boundary(const ConvertedSystem& cs, const std::vector<LaurentExpansion>& rhat, const ValueLookup& known);

struct OdeResult {
  ConvertedSystem converted;
  CoupledResult coupled;
  int boundary_checked = 0;
};

OdeResult solve_coupled_ode(const CoupledDifferentialSystem& ode, const std::vector<LaurentExpansion>& rhat,
                            const std::vector<ComponentInitialValue>& ivs, int o, const std::vector<int>& targets,
                            const SolveOptions& opt = {});

}  // namespace nestsolve
