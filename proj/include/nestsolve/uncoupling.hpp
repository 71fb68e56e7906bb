#pragma once
#include <climits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nestsolve/eps_solver.hpp"
#include "nestsolve/linalg.hpp"

namespace nestsolve {

// sum_k A[k] * I(N+k) = r(N), entries in Q(eps,N)
struct CoupledSystem {
  std::vector<Matrix<RatFun>> A;
  long valid_from = 0;

  int size() const { return A.empty() ? 0 : static_cast<int>(A[0].size()); }
  int order() const { return static_cast<int>(A.size()) - 1; }
};

// companion embedding: components k*n+i stand for I_i(N+k), k < d
CoupledSystem to_first_order(const CoupledSystem& sys);

// linear combination of coeff(eps,N) * X_index(N+shift), X = rhs r or a pivot component I
enum class Source { Rhs, Pivot };

struct TermKey {
  Source src;
  int index;
  long shift;
  bool operator<(const TermKey& o) const;
};

using Recipe = std::map<TermKey, RatFun>;

// rhs per row of to_first_order(sys); equation i becomes row (d-1)*n+i
std::vector<LaurentExpansion> first_order_rhs(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs);

Recipe recipe_add(const Recipe& a, const Recipe& b);
Recipe recipe_scale(const Recipe& a, const RatFun& c);
Recipe recipe_shift(const Recipe& a, long k);
std::string recipe_str(const Recipe& r);

struct PivotBlock {
  int component = 0;
  OpCoeffs op;        // polynomial, primitive
  RatFun multiplier;  // op = multiplier * (monic operator from elimination)
  Recipe rhs;         // op(I_component) = rhs
  long valid_from = 0;
};

struct BackSubstitution {
  int component = 0;
  Recipe formula;  // I_component(N) = formula
  long valid_from = 0;
};

struct UncoupledForm {
  int size = 0;
  std::vector<PivotBlock> blocks;
  std::vector<BackSubstitution> back;
  int regularizations = 0;
};

UncoupledForm uncouple(const CoupledSystem& first_order);

constexpr int kNoTarget = INT_MIN / 4;

struct PlanPivot {
  int component = 0;
  int initial_values = 0;  // order of the scalar operator
  int nu = kNoTarget;      // solve-to order
  int s = 0;               // eps shift of the pivot operator
  long min_index = 0;      // first index from which the scalar operator is regular
};

struct OrderPlan {
  std::vector<PlanPivot> pivots;
  std::vector<std::optional<int>> rhs_depth;  // w_i; nullopt if r_i is never used
  std::vector<int> unresolved;
};

// targets per component of the form (kNoTarget for components that are not requested)
OrderPlan plan_orders(const UncoupledForm& uf, const std::vector<int>& targets);
OrderPlan analyze(const CoupledSystem& sys, const std::vector<int>& targets);

// lowest order a recipe term can reach, at most fallback
int recipe_start(const Recipe& r, const std::vector<LaurentExpansion>& rhs,
                 const std::map<int, LaurentExpansion>& pivots, int fallback);

// sum over the recipe, orders lo..hi
LaurentExpansion instantiate(const Recipe& r, const std::vector<LaurentExpansion>& rhs,
                             const std::map<int, LaurentExpansion>& pivots, int lo, int hi);

struct ComponentInitialValue {
  int component;
  int order;
  long index;
  Q value;
};

struct CoupledResult {
  Status status = Status::Inconclusive;
  std::vector<LaurentExpansion> expansions;
  OrderPlan plan;
  std::vector<ExpansionResult> pivot_results;
  int failed_component = -1;
  long checked_from = -1;
  long verified_to = -1;
  std::string reason;
};

CoupledResult solve_coupled(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs,
                            const std::vector<ComponentInitialValue>& ivs, int o, const std::vector<int>& targets,
                            const SolveOptions& opt = {});

// substitutes expansions into the system at N = lo..hi and compares every order that is fully determined
bool coupled_substitution_check(const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs,
                                const std::vector<LaurentExpansion>& sol, long lo, long hi,
                                long* bad_index = nullptr, int* bad_row = nullptr);

}  // namespace nestsolve
