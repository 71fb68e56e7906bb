#pragma once
#include <optional>
#include <string>
#include <vector>

#include "nestsolve/operator.hpp"
#include "nestsolve/verify.hpp"

namespace nestsolve {

struct InitialValue {
  long index;
  Q value;
};

// sum_i a_i(N) I(N+i) = rhs(N) for N >= valid_from
struct RecurrenceEquation {
  OpCoeffs coeffs;
  Sequence rhs;
  long valid_from = 0;
};

// a_0 == 0 is removed by shifting the equation down
RecurrenceEquation reduce_trailing(const RecurrenceEquation& eq);

std::vector<Poly> polynomial_solutions(const OpCoeffs& a);
// certificates r with y(N+1) = r(N) y(N), sorted by degree then coefficients
std::vector<RatFun> hypergeometric_solutions(const OpCoeffs& a);
std::vector<RatFun> hypergeometric_solutions_serial(const OpCoeffs& a);

// op = L_m o (E - r_{m-1}) o ... o (E - r_0), quotients unnormalized
struct DalembertFactorization {
  OpCoeffs op;
  std::vector<RatFun> certs;
  OpCoeffs remainder;
  std::vector<Sequence> basis;
  bool full() const { return op_order(remainder) == 0; }
  int chain_length() const { return static_cast<int>(certs.size()); }
};
DalembertFactorization factor_dalembert(const OpCoeffs& a);

// y(N+1) - r(N) y(N) = g(N)
Sequence hyperexponential(const RatFun& r);
Sequence first_order_solve(const RatFun& r, const Sequence& g);
// throws NotFactorized when the remainder has positive order and rhs != 0
Sequence particular_solution(const DalembertFactorization& f, const Sequence& rhs);

struct SolutionSpace {
  std::vector<Sequence> basis;
  std::optional<Sequence> particular;
  long mu = 0;
};
SolutionSpace solution_space(const RecurrenceEquation& eq, const DalembertFactorization& f);

enum class Status { Solved, NotNestedSum, Inconclusive };
const char* status_name(Status s);

struct Decision {
  Status status = Status::Inconclusive;
  Sequence solution;
  std::vector<Q> constants;
  long mu = 0;
  std::vector<long> window;   // initial-value indices used for the combination
  std::vector<long> checked;  // surplus initial values used for verification
  long verified_to = -1;      // last index of the unroll self-check
  int chain_length = 0;
  int order = 0;
  std::string reason;
  OpCoeffs remainder;
};

struct SolveOptions {
  long check_window = kDefaultCheckWindow;
};

// threshold from coefficient roots, equation validity and expression validity
long compute_mu(const RecurrenceEquation& eq, const SolutionSpace& sp);
Decision match_initial_values(const RecurrenceEquation& eq, const SolutionSpace& sp,
                              const std::vector<InitialValue>& ivs, const SolveOptions& opt = {},
                              bool fully_factorized = true);
Decision solve_with(const RecurrenceEquation& eq, const DalembertFactorization& f,
                    const std::vector<InitialValue>& ivs, const SolveOptions& opt = {});
Decision solve_recurrence(const RecurrenceEquation& eq, const std::vector<InitialValue>& ivs,
                          const SolveOptions& opt = {});

}  // namespace nestsolve
