#pragma once
#include <optional>
#include <string>
#include <vector>

#include "nestsolve/laurent.hpp"
#include "nestsolve/rec_solver.hpp"

namespace nestsolve {

// sum_i a_i(eps, N) I(N+i) = rhs, I = sum_j eps^j I_j(N)
struct EpsRecurrence {
  OpCoeffs coeffs;
  LaurentExpansion rhs;
  long valid_from = 0;
};

struct EpsInitialValue {
  int order;
  long index;
  Q value;
};

// both sides multiplied by eps^s so that every a_i is regular at eps=0 and some a_i(0,N) != 0
EpsRecurrence normalize_epsilon(const EpsRecurrence& eq, int* s);
RecurrenceEquation constant_term_recurrence(const EpsRecurrence& normalized, int order);

// a_i = sum_t eps^t a_{i,t}, t = 0..depth-1 (normalized input)
std::vector<OpCoeffs> expand_operator(const OpCoeffs& a, int depth);

// rhs of the recurrence for I_j given I_o..I_{j-1}
Sequence peel_rhs(const std::vector<OpCoeffs>& expanded, const LaurentExpansion& rhs,
                  const LaurentExpansion& known, int j);

struct ExpansionResult {
  Status status = Status::Inconclusive;
  LaurentExpansion expansion;
  std::vector<Decision> orders;
  int failed_order = 0;
  int s = 0;
  long demand = 0;  // largest initial-value index needed
  long verified_to = -1;
  std::string reason;
};

ExpansionResult generate_expansion(const EpsRecurrence& eq, const std::vector<EpsInitialValue>& ivs, int o, int u,
                                   const SolveOptions& opt = {});

// residual of the eps-recurrence at N=n through order u, given values I(n..n+d) as series
bool eps_substitution_check(const EpsRecurrence& normalized, const LaurentExpansion& sol, int u, long lo,
                            long hi, long* bad_index = nullptr);

}  // namespace nestsolve
