#include "nestsolve/sum_expr.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "nestsolve/errors.hpp"

namespace nestsolve {

struct Expr::Node {
  Kind kind = Kind::Rat;
  RatFun rf;
  std::vector<Expr> kids;
  long lower = 0;
  Word word;
};

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    return a[i] < b[i];
  }
  return false;
}

std::string word_str(const Word& w) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ",";
    if (w[i].x == 1)
      os << w[i].m;
    else if (w[i].x == -1)
      os << -w[i].m;
    else
      os << "{" << w[i].m << "," << w[i].x.get_str() << "}";
  }
  os << "]";
  return os.str();
}

Word word_from_indices(const std::vector<int>& idx) {
  Word w;
  for (int a : idx) {
    if (a == 0) throw Error("harmonic index 0");
    w.push_back({a > 0 ? a : -a, Q(a > 0 ? 1 : -1)});
  }
  return w;
}

namespace {

bool has_top_level(const std::string& s, const char* ops) {
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && std::strchr(ops, ch)) return true;
  }
  return false;
}

}  // namespace

std::string bound_var_name(int depth) {
  static const char* names[] = {"N", "k", "j", "i", "l", "m"};
  if (depth < 6) return names[depth];
  return "k" + std::to_string(depth);
}

Expr::Expr() : Expr(rat(RatFun())) {}

Expr Expr::rat(const RatFun& f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rat;
  n->rf = f;
  return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> xs) {
  RatFun acc;
  std::vector<Expr> rest;
  for (auto& x : xs) {
    if (x.kind() == Kind::Add) {
      for (auto& k : x.kids()) {
        if (k.is_rat())
          acc += k.rf();
        else
          rest.push_back(k);
      }
    } else if (x.is_rat()) {
      acc += x.rf();
    } else {
      rest.push_back(x);
    }
  }
  if (rest.empty()) return rat(acc);
  if (!acc.is_zero()) rest.insert(rest.begin(), rat(acc));
  if (rest.size() == 1) return rest[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->kids = std::move(rest);
  return Expr(std::move(n));
}

Expr Expr::mul(std::vector<Expr> xs) {
  RatFun acc(1);
  std::vector<Expr> rest;
  for (auto& x : xs) {
    if (x.kind() == Kind::Mul) {
      for (auto& k : x.kids()) {
        if (k.is_rat())
          acc *= k.rf();
        else
          rest.push_back(k);
      }
    } else if (x.is_rat()) {
      acc *= x.rf();
    } else {
      rest.push_back(x);
    }
  }
  if (acc.is_zero()) return rat(RatFun());
  if (rest.empty()) return rat(acc);
  if (acc != RatFun(1)) rest.insert(rest.begin(), rat(acc));
  if (rest.size() == 1) return rest[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->kids = std::move(rest);
  return Expr(std::move(n));
}

Expr Expr::prod(long lower, const RatFun& q) {
  if (lower < 0) throw Error("negative product lower bound");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Prod;
  n->lower = lower;
  n->rf = q;
  return Expr(std::move(n));
}

Expr Expr::sum(long lower, const Expr& summand) {
  if (lower < 0) throw Error("negative sum lower bound");
  if (summand.is_zero()) return Expr();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->lower = lower;
  n->kids = {summand};
  return Expr(std::move(n));
}

Expr Expr::harmonic(const Word& w) {
  if (w.empty()) return rat(RatFun(1));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Harmonic;
  n->word = w;
  return Expr(std::move(n));
}

Kind Expr::kind() const { return p_->kind; }
const RatFun& Expr::rf() const { return p_->rf; }
const std::vector<Expr>& Expr::kids() const { return p_->kids; }
long Expr::lower() const { return p_->lower; }
const Word& Expr::word() const { return p_->word; }

Expr Expr::operator-() const { return mul({rat(RatFun(-1)), *this}); }

bool Expr::operator==(const Expr& o) const {
  if (p_ == o.p_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Rat: return rf() == o.rf();
    case Kind::Add:
    case Kind::Mul: return kids() == o.kids();
    case Kind::Prod: return lower() == o.lower() && rf() == o.rf();
    case Kind::Sum: return lower() == o.lower() && kids() == o.kids();
    case Kind::Harmonic: return word() == o.word();
  }
  return false;
}

std::string Expr::str(int depth) const {
  std::string v = bound_var_name(depth);
  switch (kind()) {
    case Kind::Rat: return rf().str(v);
    case Kind::Add: {
      std::string s;
      for (std::size_t i = 0; i < kids().size(); ++i) {
        std::string k = kids()[i].str(depth);
        if (i == 0)
          s = k;
        else if (k[0] == '-')
          s += " - " + k.substr(1);
        else
          s += " + " + k;
      }
      return s;
    }
    case Kind::Mul: {
      std::vector<std::string> fs;
      std::size_t first = kids()[0].is_rat() ? 1 : 0;
      for (std::size_t i = first; i < kids().size(); ++i) {
        const Expr& k = kids()[i];
        std::string ks = k.str(depth);
        if (k.kind() == Kind::Add) ks = "(" + ks + ")";
        fs.push_back(ks);
      }
      Q c = 1;
      std::string ns, ds;
      if (first) kids()[0].rf().factored_parts(v, &c, &ns, &ds);
      std::string num;
      if (c.get_num() != 1 && c.get_num() != -1) num = Z(abs(c.get_num())).get_str();
      if (!ns.empty()) num += (num.empty() ? "" : "*") + ns;
      for (auto& f : fs) num += (num.empty() ? "" : "*") + f;
      if (c < 0) num = "-" + num;
      std::string den;
      if (c.get_den() != 1) den = c.get_den().get_str();
      if (!ds.empty()) den += (den.empty() ? "" : "*") + ds;
      if (den.empty()) return num;
      bool wrap = has_top_level(den, "*+-/");
      return num + "/" + (wrap ? "(" + den + ")" : den);
    }
    case Kind::Prod: {
      if (lower() == 1 && rf().is_const()) {
        Q z = rf().const_value();
        if (z > 0 && is_integer(z)) return z.get_str() + "^" + v;
        return "(" + z.get_str() + ")^" + v;
      }
      std::string b = bound_var_name(depth + 1);
      return "Prod(" + b + "," + std::to_string(lower()) + "," + v + "," + rf().str(b) + ")";
    }
    case Kind::Sum: {
      std::string b = bound_var_name(depth + 1);
      return "Sum(" + b + "," + std::to_string(lower()) + "," + v + "," + kids()[0].str(depth + 1) + ")";
    }
    case Kind::Harmonic: return "S" + word_str(word()) + "(" + v + ")";
  }
  return "";
}

long Expr::valid_from() const {
  switch (kind()) {
    case Kind::Rat: return rf().pole_threshold();
    case Kind::Add:
    case Kind::Mul: {
      long v = 0;
      for (auto& k : kids()) v = std::max(v, k.valid_from());
      return v;
    }
    case Kind::Prod: {
      long p = rf().pole_threshold();
      if (p > lower()) return kNeverValid;
      return std::max(0L, lower() - 1);
    }
    case Kind::Sum: {
      long p = kids()[0].valid_from();
      if (p > lower()) return kNeverValid;
      return std::max(0L, lower() - 1);
    }
    case Kind::Harmonic: return 0;
  }
  return 0;
}

std::vector<Q> harmonic_values(const Word& w, long hi) {
  std::vector<Q> cur(hi + 1, Q(1));
  for (int li = static_cast<int>(w.size()) - 1; li >= 0; --li) {
    const Letter& L = w[li];
    std::vector<Q> nxt(hi + 1);
    nxt[0] = 0;
    Q xp = 1;
    for (long i = 1; i <= hi; ++i) {
      xp *= L.x;
      Z im;
      mpz_ui_pow_ui(im.get_mpz_t(), static_cast<unsigned long>(i), static_cast<unsigned long>(L.m));
      Q t = xp * cur[i] / Q(im);
      nxt[i] = nxt[i - 1] + t;
    }
    cur.swap(nxt);
  }
  return cur;
}

std::vector<Q> evaluate_range(const Expr& e, long lo, long hi) {
  if (lo < 0) throw Error("evaluation at negative index");
  if (hi < lo) return {};
  std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  switch (e.kind()) {
    case Kind::Rat: {
      std::vector<Q> r(len);
      for (long n = lo; n <= hi; ++n) r[n - lo] = e.rf().eval_N(n);
      return r;
    }
    case Kind::Add: {
      std::vector<Q> r(len, Q(0));
      for (auto& k : e.kids()) {
        auto v = evaluate_range(k, lo, hi);
        for (std::size_t i = 0; i < len; ++i) r[i] += v[i];
      }
      return r;
    }
    case Kind::Mul: {
      std::vector<Q> r(len, Q(1));
      for (auto& k : e.kids()) {
        auto v = evaluate_range(k, lo, hi);
        for (std::size_t i = 0; i < len; ++i) r[i] *= v[i];
      }
      return r;
    }
    case Kind::Sum:
    case Kind::Prod: {
      bool is_sum = e.kind() == Kind::Sum;
      long l = e.lower();
      std::vector<Q> r(len, Q(is_sum ? 0 : 1));
      if (hi < l) return r;
      std::vector<Q> f;
      if (is_sum) {
        f = evaluate_range(e.kids()[0], l, hi);
      } else {
        f.resize(hi - l + 1);
        for (long k = l; k <= hi; ++k) f[k - l] = e.rf().eval_N(k);
      }
      Q acc = is_sum ? 0 : 1;
      for (long k = l; k <= hi; ++k) {
        if (is_sum)
          acc += f[k - l];
        else
          acc *= f[k - l];
        if (k >= lo) r[k - lo] = acc;
      }
      return r;
    }
    case Kind::Harmonic: {
      auto h = harmonic_values(e.word(), hi);
      return std::vector<Q>(h.begin() + lo, h.end());
    }
  }
  return {};
}

Q evaluate(const Expr& e, long n) { return evaluate_range(e, n, n)[0]; }

Expr shift(const Expr& e, long k) {
  if (k == 0) return e;
  switch (e.kind()) {
    case Kind::Rat: return Expr::rat(e.rf().shift_N(k));
    case Kind::Add:
    case Kind::Mul: {
      std::vector<Expr> ks;
      for (auto& c : e.kids()) ks.push_back(shift(c, k));
      return e.kind() == Kind::Add ? Expr::add(ks) : Expr::mul(ks);
    }
    case Kind::Prod: {
      RatFun f(1);
      if (k > 0) {
        for (long j = 1; j <= k; ++j) f *= e.rf().shift_N(j);
        return Expr::mul({e, Expr::rat(f)});
      }
      for (long j = 0; j < -k; ++j) f *= e.rf().shift_N(-j);
      return Expr::mul({e, Expr::rat(RatFun(1) / f)});
    }
    case Kind::Sum: {
      std::vector<Expr> ks{e};
      const Expr& f = e.kids()[0];
      if (k > 0)
        for (long j = 1; j <= k; ++j) ks.push_back(shift(f, j));
      else
        for (long j = 0; j < -k; ++j) ks.push_back(-shift(f, -j));
      return Expr::add(ks);
    }
    case Kind::Harmonic: {
      const Word& w = e.word();
      const Letter& L = w[0];
      Word rest(w.begin() + 1, w.end());
      Expr rest_e = Expr::harmonic(rest);
      std::vector<Expr> ks{e};
      RatFun n = RatFun::var(NV);
      auto term = [&](long j, const Q& sign) {
        RatFun c = RatFun(sign * qpow(L.x, j)) / (n + RatFun(j)).pow(L.m);
        std::vector<Expr> fs{Expr::rat(c), shift(rest_e, j)};
        if (L.x != 1) fs.push_back(Expr::geometric(L.x));
        return Expr::mul(fs);
      };
      if (k > 0)
        for (long j = 1; j <= k; ++j) ks.push_back(term(j, 1));
      else
        for (long j = 0; j < -k; ++j) ks.push_back(term(-j, -1));
      return Expr::add(ks);
    }
  }
  return e;
}

}  // namespace nestsolve
