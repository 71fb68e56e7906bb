#pragma once
#include <gmpxx.h>
#include <string>

namespace nestsolve {

using Q = mpq_class;
using Z = mpz_class;

inline std::string to_string(const Q& q) { return q.get_str(); }

// parses "a" or "a/b" with optional sign
Q parse_rational(const std::string& s);

inline bool is_integer(const Q& q) { return q.get_den() == 1; }

Q qpow(const Q& base, long e);

}  // namespace nestsolve
