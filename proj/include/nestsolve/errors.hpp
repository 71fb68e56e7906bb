#pragma once
#include <stdexcept>
#include <string>

namespace nestsolve {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  std::size_t pos;
  std::string detail;  // message without the position
  ParseError(const std::string& msg, std::size_t p)
      : Error(msg + " at position " + std::to_string(p)), pos(p), detail(msg) {}
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};

struct ZeroPolynomial : Error {
  ZeroPolynomial() : Error("zero polynomial") {}
};

struct PoleAtZero : Error {
  PoleAtZero() : Error("pole at eps=0") {}
};

struct PoleAtPoint : Error {
  long point;
  explicit PoleAtPoint(long n) : Error("pole at N=" + std::to_string(n)), point(n) {}
};

struct UnsupportedShape : Error {
  using Error::Error;
};

struct InsufficientInitialValues : Error {
  long from, to;
  InsufficientInitialValues(long a, long b, const std::string& what = "")
      : Error("insufficient initial values: need indices " + std::to_string(a) + ".." +
              std::to_string(b) + (what.empty() ? "" : " (" + what + ")")),
        from(a), to(b) {}
};

struct RhsTooShallow : Error {
  int component;
  int order;
  RhsTooShallow(int c, int o)
      : Error("rhs expansion too shallow: component " + std::to_string(c + 1) +
              " needed through order " + std::to_string(o)),
        component(c), order(o) {}
};

struct SingularLeading : Error {
  long index;
  explicit SingularLeading(long n)
      : Error("singular leading coefficient at index " + std::to_string(n)), index(n) {}
};

struct BoundaryInconsistent : Error {
  long index;
  explicit BoundaryInconsistent(long n)
      : Error("boundary equation violated at N=" + std::to_string(n)), index(n) {}
};

struct NotFactorized : Error {
  NotFactorized() : Error("operator not fully factorized") {}
};

}  // namespace nestsolve
