#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "nestsolve/errors.hpp"
#include "nestsolve/ode_frontend.hpp"

namespace nestsolve {

using json = nlohmann::json;

// malformed problem or solution document (exit code 2)
struct ProblemError : Error {
  using Error::Error;
};

enum class ProblemKind { Recurrence, EpsRecurrence, CoupledDifference, CoupledDifferential };

const char* kind_name(ProblemKind k);

struct Problem {
  ProblemKind kind = ProblemKind::Recurrence;
  std::string description;
  std::vector<std::string> unknowns;
  OpCoeffs coefficients;                   // recurrence kinds
  std::vector<Matrix<RatFun>> matrices;    // coupled kinds
  std::vector<LaurentExpansion> rhs;       // one per equation; a recurrence has start = end = 0
  std::vector<ComponentInitialValue> ivs;  // recurrence: component 0, order 0
  int order_start = 0;
  std::vector<int> targets;
  long valid_from = 0;

  int size() const { return static_cast<int>(unknowns.size()); }
  int component(const std::string& name) const;
};

Problem parse_problem(const json& j);
Problem load_problem(const std::string& path);
json problem_to_json(const Problem& p);

Sequence parse_sequence(const json& j, const std::string& where);
// {"order_start", "order_end"?, "orders": [...]}
LaurentExpansion parse_expansion(const json& j, const std::string& where);
json expansion_to_json(const LaurentExpansion& e);

// "a..b"
std::pair<int, int> parse_order_range(const std::string& s);
void apply_orders(Problem& p, int o, int u);

json read_json_file(const std::string& path);

}  // namespace nestsolve
