#include "nestsolve/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <climits>
#include <iostream>
#include <map>
#include <sstream>

#include "nestsolve/ode_frontend.hpp"
#include "nestsolve/verify.hpp"

namespace nestsolve {

namespace {

const char* status_slug(Status s) {
  switch (s) {
    case Status::Solved:
      return "solved";
    case Status::NotNestedSum:
      return "not-nested-sum";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

int status_code(Status s) {
  switch (s) {
    case Status::Solved:
      return kExitOk;
    case Status::NotNestedSum:
      return kExitNotNested;
    case Status::Inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

// companion components k*n+i are I_i(N+k)
std::string component_name(const Problem& p, int c) {
  int n = p.size();
  if (c < n) return p.unknowns[c];
  return p.unknowns[c % n] + "(N+" + std::to_string(c / n) + ")";
}

CoupledSystem scalar_as_system(const Problem& p) {
  CoupledSystem sys;
  for (auto& a : p.coefficients) sys.A.push_back(Matrix<RatFun>{{a}});
  sys.valid_from = p.valid_from;
  return sys;
}

CoupledDifferentialSystem differential_of(const Problem& p) { return CoupledDifferentialSystem{p.matrices}; }

// system and rhs in difference form; differential problems are converted
struct DifferenceForm {
  CoupledSystem sys;
  std::vector<LaurentExpansion> rhs;
  std::optional<ConvertedSystem> converted;
};

DifferenceForm difference_form(const Problem& p) {
  DifferenceForm f;
  if (p.kind == ProblemKind::CoupledDifferential) {
    f.converted = ode_to_recurrence(differential_of(p));
    f.sys = f.converted->sys;
    f.rhs = convert_rhs(*f.converted, p.rhs);
  } else if (p.kind == ProblemKind::CoupledDifference) {
    f.sys = CoupledSystem{p.matrices, p.valid_from};
    f.rhs = p.rhs;
  } else {
    f.sys = scalar_as_system(p);
    f.rhs = p.rhs;
  }
  return f;
}

json strings(const std::vector<Q>& v) {
  json a = json::array();
  for (auto& q : v) a.push_back(q.get_str());
  return a;
}

json decision_json(const Decision& d) {
  json j;
  j["status"] = status_slug(d.status);
  j["constants"] = strings(d.constants);
  j["mu"] = d.mu;
  j["window"] = d.window;
  j["checked"] = d.checked;
  j["chain_length"] = d.chain_length;
  j["operator_order"] = d.order;
  j["verified_to"] = d.verified_to;
  if (!d.reason.empty()) j["reason"] = d.reason;
  return j;
}

json expansion_result_json(const ExpansionResult& r) {
  json j;
  j["status"] = status_slug(r.status);
  j["eps_shift"] = r.s;
  j["demand"] = r.demand;
  j["verified_to"] = r.verified_to;
  json orders = json::array();
  int o = r.expansion.start;
  for (std::size_t k = 0; k < r.orders.size(); ++k) {
    json d = decision_json(r.orders[k]);
    d["order"] = o + static_cast<int>(k);
    orders.push_back(d);
  }
  j["orders"] = orders;
  if (r.status != Status::Solved) {
    j["failed_order"] = r.failed_order;
    j["reason"] = r.reason;
  }
  return j;
}

json rows_json(const ConvertedSystem& cs) {
  json rows = json::array();
  for (std::size_t i = 0; i < cs.multipliers.size(); ++i) {
    json r;
    r["multiplier"] = cs.multipliers[i].str();
    r["shift"] = cs.row_shift[i];
    r["rhs"] = recipe_str(cs.rhs[i]);
    rows.push_back(r);
  }
  return rows;
}

// eps valuation of the row multiplier; rhat is needed through w - emin
int row_offset(const ConvertedSystem& cs, int i) {
  int emin = INT_MAX;
  for (auto& [k, c] : cs.rhs[i]) emin = std::min(emin, c.eps_valuation());
  return emin == INT_MAX ? 0 : emin;
}

json plan_json(const Problem& p, const OrderPlan& plan, const ConvertedSystem* cs) {
  json j;
  json pivots = json::array();
  std::ostringstream sum;
  sum << "{{";
  bool first = true;
  for (auto& pp : plan.pivots) {
    json e;
    e["unknown"] = component_name(p, pp.component);
    e["initial_values"] = pp.initial_values;
    e["order"] = pp.nu == kNoTarget ? json() : json(pp.nu);
    e["eps_shift"] = pp.s;
    e["min_index"] = pp.min_index;
    pivots.push_back(e);
    if (pp.nu == kNoTarget) continue;
    sum << (first ? "" : ",") << "{" << component_name(p, pp.component) << "," << pp.initial_values << "," << pp.nu
        << "}";
    first = false;
  }
  sum << "},{";
  json depth = json::array();
  for (std::size_t i = 0; i < plan.rhs_depth.size(); ++i) {
    if (!plan.rhs_depth[i]) {
      depth.push_back(nullptr);
      sum << (i ? "," : "") << "-";
      continue;
    }
    int w = *plan.rhs_depth[i] - (cs ? row_offset(*cs, static_cast<int>(i)) : 0);
    depth.push_back(w);
    sum << (i ? "," : "") << w;
  }
  sum << "},{";
  json unresolved = json::array();
  for (std::size_t i = 0; i < plan.unresolved.size(); ++i) {
    unresolved.push_back(component_name(p, plan.unresolved[i]));
    sum << (i ? "," : "") << component_name(p, plan.unresolved[i]);
  }
  sum << "}}";
  j["pivots"] = pivots;
  j["rhs_depth"] = depth;
  j["unresolved"] = unresolved;
  j["summary"] = sum.str();
  return j;
}

// accumulates named checks and the first counterexample
struct Report {
  json checks = json::array();
  json counterexample;
  bool ok = true;

  void pass(const std::string& name, json extra = json::object()) {
    extra["name"] = name;
    extra["result"] = "pass";
    checks.push_back(extra);
  }
  void skip(const std::string& name, const std::string& why) {
    checks.push_back(json{{"name", name}, {"result", "skipped"}, {"reason", why}});
  }
  void fail(const std::string& name, json ce) {
    checks.push_back(json{{"name", name}, {"result", "fail"}});
    if (ok) counterexample = ce;
    ok = false;
  }
};

json mismatch(const std::string& unknown, std::optional<int> order, long index, const Q& expected, const Q& actual) {
  json c;
  c["unknown"] = unknown;
  if (order) c["order"] = *order;
  c["index"] = index;
  c["expected"] = expected.get_str();
  c["actual"] = actual.get_str();
  return c;
}

// first s >= from with s..s+d-1 all present
std::optional<long> find_window(const std::map<long, std::vector<Q>>& known, long from, int d) {
  for (auto it = known.lower_bound(from); it != known.end(); ++it) {
    long s = it->first;
    bool all = true;
    for (long t = 0; t < d && all; ++t) all = known.count(s + t) > 0;
    if (all) return s;
  }
  return std::nullopt;
}

// index -> values of orders lo..hi of one component, only complete entries
std::map<long, std::vector<Q>> series_values(const std::vector<ComponentInitialValue>& ivs, int comp, int lo,
                                             int hi) {
  std::map<long, std::map<int, Q>> raw;
  for (auto& v : ivs)
    if (v.component == comp && v.order >= lo && v.order <= hi) raw[v.index][v.order] = v.value;
  std::map<long, std::vector<Q>> out;
  for (auto& [idx, m] : raw) {
    if (static_cast<int>(m.size()) != hi - lo + 1) continue;
    std::vector<Q> v;
    for (auto& [o, q] : m) v.push_back(q);
    out[idx] = v;
  }
  return out;
}

void check_supplied(const Problem& p, const std::vector<LaurentExpansion>& sols, Report& rep) {
  int count = 0;
  for (auto& v : p.ivs) {
    if (v.component < 0 || v.component >= static_cast<int>(sols.size())) continue;
    const auto& e = sols[v.component];
    if (e.coeffs.empty() || v.order > e.end()) continue;
    Sequence s = e.at(v.order);
    if (v.index < s.valid_from()) continue;
    Q got = s.evaluate(v.index);
    ++count;
    if (got != v.value) {
      std::optional<int> ord;
      if (p.kind != ProblemKind::Recurrence) ord = v.order;
      rep.fail("initial-values", mismatch(p.unknowns[v.component], ord, v.index, v.value, got));
      return;
    }
  }
  rep.pass("initial-values", json{{"count", count}});
}

// unrolls op(I) = rhs from supplied values and compares orders lo..cap of sol at each index
void check_unroll_eps(const std::string& name, const std::string& unknown, const OpCoeffs& op,
                      const LaurentExpansion& rhs, long valid_from, const LaurentExpansion& sol,
                      const std::vector<ComponentInitialValue>& ivs, int comp, long window, Report& rep,
                      bool required) {
  int d = op_order(op);
  int o = sol.start, u = sol.end();
  if (sol.coeffs.empty()) return rep.skip(name, "no orders to check");
  long reg = std::max(valid_from, regular_from(op));
  auto known = series_values(ivs, comp, o, u);
  auto s = find_window(known, reg, d);
  if (!s) {
    if (required) throw InsufficientInitialValues(reg, reg + d - 1, "verification");
    return rep.skip(name, "no " + std::to_string(d) + " consecutive initial values from N=" + std::to_string(reg));
  }
  std::vector<QSeries> init;
  for (int t = 0; t < d; ++t) init.push_back(QSeries{o, known[*s + t]});
  long up_to = *s + d - 1 + window;
  std::vector<QSeries> vals;
  try {
    vals = unroll_eps(op, rhs, *s, init, up_to, u);
  } catch (const SingularLeading& e) {
    return rep.skip(name, e.what());
  }
  int exact_to = u;
  for (long n = *s; n <= up_to; ++n) {
    const QSeries& v = vals[n - *s];
    exact_to = std::min(exact_to, v.end());
    for (int j = o; j <= std::min(u, v.end()); ++j) {
      Sequence c = sol.at(j);
      if (n < c.valid_from()) continue;
      Q got = c.evaluate(n);
      if (got != v.at(j)) return rep.fail(name, mismatch(unknown, j, n, v.at(j), got));
    }
    for (int j = v.start; j < o; ++j)
      if (v.at(j) != 0) return rep.fail(name, mismatch(unknown, j, n, v.at(j), Q(0)));
  }
  if (exact_to < o) return rep.fail(name, json{{"unknown", unknown}, {"reason", "rhs too shallow to reproduce order " +
                                                                                   std::to_string(o)}});
  rep.pass(name, json{{"from", *s}, {"to", up_to}, {"orders_checked_to", exact_to}});
}

void verify_recurrence(const Problem& p, const Sequence& sol, long window, Report& rep) {
  LaurentExpansion e{0, {sol}};
  check_supplied(p, {e}, rep);
  const OpCoeffs& a = p.coefficients;
  int d = op_order(a);
  long reg = std::max(p.valid_from, regular_from(a));
  std::map<long, std::vector<Q>> known;
  for (auto& v : p.ivs) known[v.index] = {v.value};
  auto s = find_window(known, reg, d);
  if (!s) throw InsufficientInitialValues(reg, reg + d - 1, "verification");
  std::vector<Q> init;
  for (int t = 0; t < d; ++t) init.push_back(known[*s + t][0]);
  long up_to = *s + d - 1 + window;
  const Sequence& r = p.rhs[0].coeffs[0];
  auto ref = unroll(a, [&](long n) { return r.evaluate(n); }, *s, init, up_to);
  long lo = std::max(*s, sol.valid_from());
  if (lo > up_to) return rep.skip("unroll", "solution valid only from N=" + std::to_string(sol.valid_from()));
  std::vector<Q> tail(ref.begin() + (lo - *s), ref.end());
  Comparison c = compare_values(sol, tail, lo);
  if (!c.equal) return rep.fail("unroll", mismatch(p.unknowns[0], std::nullopt, c.index, c.rhs, c.lhs));
  rep.pass("unroll", json{{"from", lo}, {"to", up_to}});
}

void verify_eps(const Problem& p, const LaurentExpansion& sol, long window, Report& rep) {
  check_supplied(p, {sol}, rep);
  check_unroll_eps("unroll", p.unknowns[0], p.coefficients, p.rhs[0], p.valid_from, sol, p.ivs, 0, window, rep,
                   true);
}

void verify_coupled(const Problem& p, const CoupledSystem& sys, const std::vector<LaurentExpansion>& rhs,
                    const std::vector<LaurentExpansion>& sols, long window, Report& rep) {
  int n = sys.size();
  check_supplied(p, sols, rep);
  long lo = std::max(0L, sys.valid_from);
  for (auto& e : sols)
    for (auto& s : e.coeffs) lo = std::max(lo, s.valid_from());
  long bad = -1;
  int row = -1;
  if (!coupled_substitution_check(sys, rhs, sols, lo, lo + window, &bad, &row))
    rep.fail("substitution", json{{"equation", row + 1}, {"index", bad}});
  else
    rep.pass("substitution", json{{"from", lo}, {"to", lo + window}});

  auto uf = uncouple(to_first_order(sys));
  auto frhs = first_order_rhs(sys, rhs);
  std::map<int, LaurentExpansion> pivots;
  for (auto& blk : uf.blocks) {
    int c = blk.component, k = c / n;
    LaurentExpansion e = sols[c % n];
    for (auto& s : e.coeffs) s = s.shift(k);
    pivots[c] = e;
  }
  for (auto& blk : uf.blocks) {
    if (blk.component >= n) continue;
    const auto& sol = sols[blk.component];
    std::string name = "pivot-unroll " + p.unknowns[blk.component];
    if (sol.coeffs.empty()) continue;
    int s = 0;
    normalize_epsilon(EpsRecurrence{blk.op, {}, blk.valid_from}, &s);
    int top = sol.end() - s;
    LaurentExpansion r;
    try {
      r = instantiate(blk.rhs, frhs, pivots, std::min(recipe_start(blk.rhs, frhs, pivots, sol.start - s), top), top);
    } catch (const Error& e) {
      rep.skip(name, e.what());
      continue;
    }
    check_unroll_eps(name, p.unknowns[blk.component], blk.op, r, blk.valid_from, sol, p.ivs, blk.component, window,
                     rep, false);
  }
}

std::vector<LaurentExpansion> read_expansions(const Problem& p, const json& sol) {
  std::vector<LaurentExpansion> out;
  for (auto& u : p.unknowns) {
    if (!sol.contains(u)) throw ProblemError("solution: missing unknown \"" + u + "\"");
    out.push_back(parse_expansion(sol.at(u), "solution." + u));
  }
  return out;
}

// supplied values, else solution values from index `from` on
ValueLookup boundary_lookup(const Problem& p, const std::vector<LaurentExpansion>& sols, long from) {
  return [&p, &sols, from](int comp, long idx) -> std::optional<QSeries> {
    const auto& e = sols[comp];
    if (e.coeffs.empty()) return std::nullopt;
    auto known = series_values(p.ivs, comp, e.start, e.end());
    auto it = known.find(idx);
    if (it != known.end()) return QSeries{e.start, it->second};
    if (idx < from) return std::nullopt;
    QSeries s{e.start, {}};
    for (auto& c : e.coeffs) {
      if (idx < c.valid_from()) return std::nullopt;
      s.c.push_back(c.evaluate(idx));
    }
    return s;
  };
}

std::string join_depth(const json& depth) {
  std::string s = "(";
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (i) s += ",";
    s += depth[i].is_null() ? "-" : std::to_string(depth[i].get<int>());
  }
  return s + ")";
}

}  // namespace

json cmd_analyze(const Problem& p) {
  json j;
  j["kind"] = kind_name(p.kind);
  j["unknowns"] = p.unknowns;
  if (p.kind == ProblemKind::Recurrence) {
    RecurrenceEquation eq = reduce_trailing(RecurrenceEquation{p.coefficients, p.rhs[0].coeffs[0], p.valid_from});
    int d = op_order(eq.coeffs);
    json piv;
    piv["unknown"] = p.unknowns[0];
    piv["initial_values"] = d;
    piv["min_index"] = std::max(eq.valid_from, regular_from(eq.coeffs));
    j["pivots"] = json::array({piv});
    j["rhs_depth"] = json::array();
    j["unresolved"] = json::array();
    j["summary"] = "{{{" + p.unknowns[0] + "," + std::to_string(d) + "}},{},{}}";
    return j;
  }
  DifferenceForm f = difference_form(p);
  OrderPlan plan = analyze(f.sys, p.targets);
  json pj = plan_json(p, plan, f.converted ? &*f.converted : nullptr);
  for (auto& [k, v] : pj.items()) j[k] = v;
  j["order_start"] = p.order_start;
  j["targets"] = p.targets;
  if (f.converted) {
    j["rows"] = rows_json(*f.converted);
    j["boundary_equations"] = f.converted->boundary.size();
    j["valid_from"] = f.converted->sys.valid_from;
  }
  return j;
}

json cmd_solve(const Problem& p, const SolveOptions& opt, int* code) {
  json doc;
  doc["kind"] = kind_name(p.kind);
  doc["unknowns"] = p.unknowns;
  Status st = Status::Inconclusive;
  std::string reason;
  json solution = json::object();
  if (p.kind == ProblemKind::Recurrence) {
    std::vector<InitialValue> ivs;
    for (auto& v : p.ivs) ivs.push_back({v.index, v.value});
    Decision d = solve_recurrence(RecurrenceEquation{p.coefficients, p.rhs[0].coeffs[0], p.valid_from}, ivs, opt);
    st = d.status;
    reason = d.reason;
    if (st == Status::Solved) solution[p.unknowns[0]] = d.solution.str();
    doc["details"] = decision_json(d);
  } else if (p.kind == ProblemKind::EpsRecurrence) {
    std::vector<EpsInitialValue> ivs;
    for (auto& v : p.ivs) ivs.push_back({v.order, v.index, v.value});
    ExpansionResult r =
        generate_expansion(EpsRecurrence{p.coefficients, p.rhs[0], p.valid_from}, ivs, p.order_start, p.targets[0], opt);
    st = r.status;
    reason = r.reason;
    if (st == Status::Solved) solution[p.unknowns[0]] = expansion_to_json(r.expansion);
    doc["details"] = expansion_result_json(r);
  } else {
    CoupledResult cr;
    json details;
    if (p.kind == ProblemKind::CoupledDifferential) {
      OdeResult r = solve_coupled_ode(differential_of(p), p.rhs, p.ivs, p.order_start, p.targets, opt);
      cr = r.coupled;
      details["rows"] = rows_json(r.converted);
      details["boundary_checked"] = r.boundary_checked;
      details["plan"] = plan_json(p, cr.plan, &r.converted);
    } else {
      cr = solve_coupled(CoupledSystem{p.matrices, p.valid_from}, p.rhs, p.ivs, p.order_start, p.targets, opt);
      details["plan"] = plan_json(p, cr.plan, nullptr);
    }
    st = cr.status;
    reason = cr.reason;
    json pr = json::array();
    for (auto& r : cr.pivot_results) pr.push_back(expansion_result_json(r));
    details["pivots"] = pr;
    details["checked_from"] = cr.checked_from;
    details["verified_to"] = cr.verified_to;
    if (cr.failed_component >= 0) details["failed_unknown"] = p.unknowns[cr.failed_component];
    doc["details"] = details;
    if (st == Status::Solved)
      for (int i = 0; i < p.size(); ++i) solution[p.unknowns[i]] = expansion_to_json(cr.expansions[i]);
  }
  doc["solution"] = solution;

  if (st == Status::Solved) {
    json ver;
    ver["check_window"] = opt.check_window;
    try {
      int vc = 0;
      json rep = cmd_verify(p, doc, opt.check_window, &vc);
      ver["result"] = rep["result"];
      ver["checks"] = rep["checks"];
      if (vc != kExitOk) {
        st = Status::Inconclusive;
        reason = "independent verification failed";
        ver["counterexample"] = rep["counterexample"];
        doc["solution"] = json::object();
      }
    } catch (const InsufficientInitialValues& e) {
      ver["result"] = "skipped";
      ver["reason"] = e.what();
    }
    doc["verification"] = ver;
  }
  doc["status"] = status_slug(st);
  if (!reason.empty()) doc["reason"] = reason;
  *code = status_code(st);
  return doc;
}

json cmd_verify(const Problem& p, const json& document, long window, int* code) {
  const json& sol = document.contains("solution") ? document.at("solution") : document;
  if (!sol.is_object()) throw ProblemError("solution: expected an object keyed by unknown");
  Report rep;
  switch (p.kind) {
    case ProblemKind::Recurrence: {
      const std::string& u = p.unknowns[0];
      if (!sol.contains(u)) throw ProblemError("solution: missing unknown \"" + u + "\"");
      verify_recurrence(p, parse_sequence(sol.at(u), "solution." + u), window, rep);
      break;
    }
    case ProblemKind::EpsRecurrence:
      verify_eps(p, read_expansions(p, sol)[0], window, rep);
      break;
    case ProblemKind::CoupledDifference:
      verify_coupled(p, CoupledSystem{p.matrices, p.valid_from}, p.rhs, read_expansions(p, sol), window, rep);
      break;
    case ProblemKind::CoupledDifferential: {
      auto sols = read_expansions(p, sol);
      DifferenceForm f = difference_form(p);
      verify_coupled(p, f.sys, f.rhs, sols, window, rep);
      try {
        int n = check_boundary(*f.converted, p.rhs, boundary_lookup(p, sols, f.sys.valid_from));
        rep.pass("boundary", json{{"checked", n}, {"equations", f.converted->boundary.size()}});
      } catch (const BoundaryInconsistent& e) {
        rep.fail("boundary", json{{"index", e.index}});
      }
      break;
    }
  }
  json j;
  j["kind"] = kind_name(p.kind);
  j["check_window"] = window;
  j["checks"] = rep.checks;
  j["result"] = rep.ok ? "pass" : "fail";
  if (!rep.ok) j["counterexample"] = rep.counterexample;
  *code = rep.ok ? kExitOk : kExitInconclusive;
  return j;
}

std::string analyze_text(const json& r) {
  std::ostringstream o;
  for (auto& pv : r["pivots"]) {
    o << "pivot " << pv["unknown"].get<std::string>() << ", " << pv["initial_values"].get<int>() << " initial values";
    if (pv.contains("order") && !pv["order"].is_null()) o << ", order " << pv["order"].get<int>();
    o << ", regular from N=" << pv["min_index"].get<long>() << "\n";
  }
  if (!r["rhs_depth"].empty()) o << "rhs depth " << join_depth(r["rhs_depth"]) << "\n";
  if (!r["unresolved"].empty()) {
    o << "unresolved:";
    for (auto& u : r["unresolved"]) o << " " << u.get<std::string>();
    o << "\n";
  }
  if (r.contains("rows"))
    for (std::size_t i = 0; i < r["rows"].size(); ++i)
      o << "row " << i + 1 << ": multiplier " << r["rows"][i]["multiplier"].get<std::string>() << ", shift "
        << r["rows"][i]["shift"].get<long>() << "\n";
  return o.str();
}

std::string solve_text(const json& doc) {
  std::ostringstream o;
  o << "status: " << doc["status"].get<std::string>() << "\n";
  if (doc.contains("reason")) o << "reason: " << doc["reason"].get<std::string>() << "\n";
  for (auto& [name, v] : doc["solution"].items()) {
    if (v.is_string()) {
      o << name << "(N) = " << v.get<std::string>() << "\n";
      continue;
    }
    int s = v["order_start"].get<int>();
    o << name << "(N) =\n";
    for (std::size_t k = 0; k < v["orders"].size(); ++k)
      o << "  eps^" << s + static_cast<int>(k) << ": " << v["orders"][k].get<std::string>() << "\n";
    o << "  + O(eps^" << v["order_end"].get<int>() + 1 << ")\n";
  }
  if (doc.contains("verification")) {
    const json& ver = doc["verification"];
    o << "verification: " << ver["result"].get<std::string>() << " (window " << ver["check_window"].get<long>()
      << ")\n";
  }
  return o.str();
}

std::string verify_text(const json& r) {
  std::ostringstream o;
  o << "verification: " << r["result"].get<std::string>() << "\n";
  for (auto& c : r["checks"]) {
    o << "  " << c["name"].get<std::string>() << ": " << c["result"].get<std::string>();
    if (c.contains("from")) o << " (N=" << c["from"].get<long>() << ".." << c["to"].get<long>() << ")";
    if (c.contains("reason")) o << " (" << c["reason"].get<std::string>() << ")";
    o << "\n";
  }
  if (r.contains("counterexample")) o << "  counterexample: " << r["counterexample"].dump() << "\n";
  return o.str();
}

int error_to_json(const std::exception& e, json* out) {
  json j;
  int code = kExitInconclusive;
  std::string kind = "inconclusive";
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    code = kExitParse;
    kind = "parse-error";
    j["position"] = pe->pos;
  } else if (dynamic_cast<const ProblemError*>(&e)) {
    code = kExitParse;
    kind = "invalid-input";
  } else if (auto* ie = dynamic_cast<const InsufficientInitialValues*>(&e)) {
    code = kExitInsufficient;
    kind = "insufficient-initial-values";
    j["needed_from"] = ie->from;
    j["needed_to"] = ie->to;
  } else if (auto* re = dynamic_cast<const RhsTooShallow*>(&e)) {
    code = kExitInsufficient;
    kind = "rhs-too-shallow";
    j["equation"] = re->component + 1;
    j["required_order"] = re->order;
  } else if (auto* be = dynamic_cast<const BoundaryInconsistent*>(&e)) {
    kind = "boundary-inconsistent";
    j["index"] = be->index;
  } else if (dynamic_cast<const UnsupportedShape*>(&e)) {
    kind = "unsupported";
  } else if (!dynamic_cast<const Error*>(&e)) {
    kind = "internal";
  }
  j["error"] = kind;
  j["message"] = e.what();
  j["exit_code"] = code;
  *out = j;
  return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed forms in nested sums for recurrences and coupled systems", "nestsolve"};
  app.require_subcommand(1);
  struct Opts {
    std::string file, orders, solution;
    long window = LONG_MIN;
    bool json_out = false;
  } opts;
  auto common = [&](CLI::App* sub) {
    sub->add_option("file", opts.file, "problem file (JSON)")->required();
    sub->add_option("--orders", opts.orders, "eps orders a..b to compute");
    sub->add_option("--check-window", opts.window, "indices checked beyond the initial values");
    sub->add_flag("--json", opts.json_out, "machine-readable output");
  };
  auto* an = app.add_subcommand("analyze", "report pivots, initial-value counts and rhs depth");
  auto* so = app.add_subcommand("solve", "compute closed forms");
  auto* ve = app.add_subcommand("verify", "check a solution document against the problem");
  common(an);
  common(so);
  common(ve);
  ve->add_option("--solution", opts.solution, "solution document (default: stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    json j{{"error", "usage"}, {"message", e.what()}, {"exit_code", kExitParse}};
    err << j.dump() << "\n";
    return kExitParse;
  }

  try {
    if (opts.window == LONG_MIN)
      opts.window = default_check_window();
    else if (opts.window <= 0)
      throw ProblemError("--check-window: expected a positive integer");
    Problem p = load_problem(opts.file);
    if (!opts.orders.empty()) {
      if (p.kind == ProblemKind::Recurrence) throw ProblemError("--orders: the problem has no eps expansion");
      auto [o, u] = parse_order_range(opts.orders);
      apply_orders(p, o, u);
    }
    SolveOptions sopt;
    sopt.check_window = opts.window;
    int code = kExitOk;
    json doc;
    std::string text;
    if (an->parsed()) {
      doc = cmd_analyze(p);
      text = analyze_text(doc);
    } else if (so->parsed()) {
      doc = cmd_solve(p, sopt, &code);
      text = solve_text(doc);
    } else {
      json sol;
      if (opts.solution.empty() || opts.solution == "-") {
        try {
          sol = json::parse(std::cin);
        } catch (const json::parse_error& e) {
          throw ProblemError(std::string("solution: invalid JSON: ") + e.what());
        }
      } else {
        sol = read_json_file(opts.solution);
      }
      doc = cmd_verify(p, sol, opts.window, &code);
      text = verify_text(doc);
    }
    if (opts.json_out)
      out << doc.dump(2) << "\n";
    else
      out << text;
    if (code != kExitOk) {
      json j;
      j["error"] = code == kExitNotNested ? "not-nested-sum" : (so->parsed() ? "inconclusive" : "verification-failed");
      j["message"] = doc.contains("reason") ? doc["reason"].get<std::string>()
                                            : (doc.contains("counterexample") ? doc["counterexample"].dump() : "");
      j["exit_code"] = code;
      err << j.dump() << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    json j;
    int code = error_to_json(e, &j);
    err << j.dump() << "\n";
    return code;
  }
}

}  // namespace nestsolve
