#include "nestsolve/problem.hpp"

#include <algorithm>
#include <climits>
#include <fstream>

#include "nestsolve/sum_expr.hpp"

namespace nestsolve {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ProblemError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

std::string as_string(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ProblemError(where + ": expected a string");
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ProblemError(where + ": expected an integer");
  return j.get<int>();
}

RatFun ratfun_at(const json& j, const std::string& where) {
  std::string s = as_string(j, where);
  try {
    return parse_ratfun(s);
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.detail, e.pos);
  }
}


Q rational_at(const json& j, const std::string& where) {
  std::string s = as_string(j, where);
  try {
    return parse_rational(s);
  } catch (const Error&) {
    throw ProblemError(where + ": bad rational \"" + s + "\"");
  }
}

Matrix<RatFun> matrix_at(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw ProblemError(where + ": expected " + std::to_string(n) + " rows");
  Matrix<RatFun> m(n);
  for (int i = 0; i < n; ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
      throw ProblemError(w + ": expected " + std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) m[i].push_back(ratfun_at(j[i][k], w + "[" + std::to_string(k) + "]"));
  }
  return m;
}

}  // namespace

Sequence parse_sequence(const json& j, const std::string& where) {
  std::string s = as_string(j, where);
  try {
    return Sequence::from_expr(parse_expr(s));
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.detail, e.pos);
  }
}

LaurentExpansion parse_expansion(const json& j, const std::string& where) {
  LaurentExpansion e;
  e.start = as_int(field(j, "order_start", where), where + ".order_start");
  const json& orders = field(j, "orders", where);
  if (!orders.is_array()) throw ProblemError(where + ".orders: expected an array");
  for (std::size_t i = 0; i < orders.size(); ++i)
    e.coeffs.push_back(parse_sequence(orders[i], where + ".orders[" + std::to_string(i) + "]"));
  if (j.contains("order_end") && as_int(j.at("order_end"), where + ".order_end") != e.end())
    throw ProblemError(where + ": order_end does not match the number of orders");
  return e;
}

json expansion_to_json(const LaurentExpansion& e) {
  json o;
  o["order_start"] = e.start;
  o["order_end"] = e.end();
  json a = json::array();
  for (auto& c : e.coeffs) a.push_back(c.str());
  o["orders"] = a;
  return o;
}


const char* kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::Recurrence:
      return "recurrence";
    case ProblemKind::EpsRecurrence:
      return "eps-recurrence";
    case ProblemKind::CoupledDifference:
      return "coupled-difference";
    case ProblemKind::CoupledDifferential:
      return "coupled-differential";
  }
  return "?";
}

int Problem::component(const std::string& name) const {
  auto it = std::find(unknowns.begin(), unknowns.end(), name);
  if (it == unknowns.end()) throw ProblemError("unknown \"" + name + "\" is not declared");
  return static_cast<int>(it - unknowns.begin());
}

Problem parse_problem(const json& j) {
  if (!j.is_object()) throw ProblemError("problem: expected a JSON object");
  Problem p;
  std::string kind = as_string(field(j, "kind", "problem"), "kind");
  if (kind == "recurrence")
    p.kind = ProblemKind::Recurrence;
  else if (kind == "eps-recurrence")
    p.kind = ProblemKind::EpsRecurrence;
  else if (kind == "coupled-difference")
    p.kind = ProblemKind::CoupledDifference;
  else if (kind == "coupled-differential")
    p.kind = ProblemKind::CoupledDifferential;
  else
    throw ProblemError("kind: unsupported value \"" + kind + "\"");
  if (j.contains("description")) p.description = as_string(j.at("description"), "description");
  bool scalar = p.kind == ProblemKind::Recurrence || p.kind == ProblemKind::EpsRecurrence;
  if (j.contains("unknowns")) {
    const json& u = j.at("unknowns");
    if (!u.is_array() || u.empty()) throw ProblemError("unknowns: expected a non-empty array");
    for (std::size_t i = 0; i < u.size(); ++i) p.unknowns.push_back(as_string(u[i], "unknowns[" + std::to_string(i) + "]"));
  } else if (scalar) {
    p.unknowns = {"I"};
  } else {
    throw ProblemError("problem: missing field \"unknowns\"");
  }
  if (scalar && p.size() != 1) throw ProblemError("unknowns: a recurrence has exactly one unknown");
  if (j.contains("valid_from")) p.valid_from = as_int(j.at("valid_from"), "valid_from");

  if (scalar) {
    const json& c = field(j, "coefficients", "problem");
    if (!c.is_array() || c.size() < 2) throw ProblemError("coefficients: expected at least two entries");
    for (std::size_t i = 0; i < c.size(); ++i)
      p.coefficients.push_back(ratfun_at(c[i], "coefficients[" + std::to_string(i) + "]"));
    if (p.kind == ProblemKind::Recurrence) {
      for (std::size_t i = 0; i < p.coefficients.size(); ++i)
        if (p.coefficients[i].has(EPS) || p.coefficients[i].has(X))
          throw ProblemError("coefficients[" + std::to_string(i) + "]: a recurrence depends on N only");
      Sequence r = j.contains("rhs") ? parse_sequence(j.at("rhs"), "rhs") : Sequence();
      p.rhs = {LaurentExpansion{0, {r}}};
    } else {
      p.rhs = {parse_expansion(field(j, "rhs", "problem"), "rhs")};
    }
  } else {
    const json& ms = field(j, "matrices", "problem");
    if (!ms.is_array() || ms.size() < 2) throw ProblemError("matrices: expected at least two matrices");
    for (std::size_t k = 0; k < ms.size(); ++k)
      p.matrices.push_back(matrix_at(ms[k], p.size(), "matrices[" + std::to_string(k) + "]"));
    const json& r = field(j, "rhs", "problem");
    if (!r.is_array() || static_cast<int>(r.size()) != p.size())
      throw ProblemError("rhs: expected one expansion per equation");
    for (std::size_t i = 0; i < r.size(); ++i) p.rhs.push_back(parse_expansion(r[i], "rhs[" + std::to_string(i) + "]"));
    if (p.kind == ProblemKind::CoupledDifference)
      for (std::size_t k = 0; k < p.matrices.size(); ++k)
        for (auto& row : p.matrices[k])
          for (auto& e : row)
            if (e.has(X)) throw ProblemError("matrices[" + std::to_string(k) + "]: a difference system has no x");
    if (p.kind == ProblemKind::CoupledDifferential)
      for (std::size_t k = 0; k < p.matrices.size(); ++k)
        for (auto& row : p.matrices[k])
          for (auto& e : row)
            if (e.has(NV)) throw ProblemError("matrices[" + std::to_string(k) + "]: a differential system has no N");
  }

  if (j.contains("initial_values")) {
    const json& iv = j.at("initial_values");
    if (!iv.is_array()) throw ProblemError("initial_values: expected an array");
    for (std::size_t i = 0; i < iv.size(); ++i) {
      std::string w = "initial_values[" + std::to_string(i) + "]";
      ComponentInitialValue v{0, 0, 0, 0};
      if (iv[i].contains("unknown")) v.component = p.component(as_string(iv[i].at("unknown"), w + ".unknown"));
      if (iv[i].contains("order")) v.order = as_int(iv[i].at("order"), w + ".order");
      v.index = as_int(field(iv[i], "index", w), w + ".index");
      if (v.index < 0) throw ProblemError(w + ".index: must be non-negative");
      v.value = rational_at(field(iv[i], "value", w), w + ".value");
      p.ivs.push_back(v);
    }
  }

  if (p.kind != ProblemKind::Recurrence) {
    int lowest = INT_MAX;
    for (auto& r : p.rhs) lowest = std::min(lowest, r.start);
    p.order_start = j.contains("order_start") ? as_int(j.at("order_start"), "order_start") : lowest;
    if (j.contains("targets")) {
      const json& t = j.at("targets");
      if (!t.is_array() || static_cast<int>(t.size()) != p.size())
        throw ProblemError("targets: expected one order per unknown");
      for (std::size_t i = 0; i < t.size(); ++i) p.targets.push_back(as_int(t[i], "targets[" + std::to_string(i) + "]"));
    } else {
      p.targets.assign(p.size(), p.order_start);
    }
  }
  return p;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ProblemError(path + ": invalid JSON: " + e.what());
  }
}

Problem load_problem(const std::string& path) { return parse_problem(read_json_file(path)); }

json problem_to_json(const Problem& p) {
  json j;
  j["kind"] = kind_name(p.kind);
  if (!p.description.empty()) j["description"] = p.description;
  j["unknowns"] = p.unknowns;
  if (p.valid_from) j["valid_from"] = p.valid_from;
  if (p.kind == ProblemKind::Recurrence || p.kind == ProblemKind::EpsRecurrence) {
    json c = json::array();
    for (auto& a : p.coefficients) c.push_back(a.str());
    j["coefficients"] = c;
    if (p.kind == ProblemKind::Recurrence)
      j["rhs"] = p.rhs[0].coeffs[0].str();
    else
      j["rhs"] = expansion_to_json(p.rhs[0]);
  } else {
    json ms = json::array();
    for (auto& m : p.matrices) {
      json mj = json::array();
      for (auto& row : m) {
        json rj = json::array();
        for (auto& e : row) rj.push_back(e.str());
        mj.push_back(rj);
      }
      ms.push_back(mj);
    }
    j["matrices"] = ms;
    json r = json::array();
    for (auto& e : p.rhs) r.push_back(expansion_to_json(e));
    j["rhs"] = r;
  }
  json iv = json::array();
  for (auto& v : p.ivs) {
    json o;
    o["index"] = v.index;
    o["value"] = v.value.get_str();
    if (p.kind != ProblemKind::Recurrence) o["order"] = v.order;
    if (p.size() > 1) o["unknown"] = p.unknowns[v.component];
    iv.push_back(o);
  }
  j["initial_values"] = iv;
  if (p.kind != ProblemKind::Recurrence) {
    j["order_start"] = p.order_start;
    j["targets"] = p.targets;
  }
  return j;
}

std::pair<int, int> parse_order_range(const std::string& s) {
  auto pos = s.find("..");
  if (pos == std::string::npos) throw ProblemError("--orders: expected a..b, got \"" + s + "\"");
  try {
    std::size_t ia = 0, ib = 0;
    std::string a = s.substr(0, pos), b = s.substr(pos + 2);
    int o = std::stoi(a, &ia), u = std::stoi(b, &ib);
    if (ia != a.size() || ib != b.size()) throw std::invalid_argument("trailing");
    if (u < o) throw ProblemError("--orders: empty range " + s);
    return {o, u};
  } catch (const std::logic_error&) {
    throw ProblemError("--orders: expected a..b, got \"" + s + "\"");
  }
}

void apply_orders(Problem& p, int o, int u) {
  p.order_start = o;
  p.targets.assign(p.size(), u);
}

}  // namespace nestsolve
