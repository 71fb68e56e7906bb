#pragma once
#include <string>
#include <vector>

#include "nestsolve/sequence.hpp"

namespace nestsolve {

// eps^start C_start + ... + eps^end C_end + O(eps^(end+1))
struct LaurentExpansion {
  int start = 0;
  std::vector<Sequence> coeffs;

  int end() const { return start + static_cast<int>(coeffs.size()) - 1; }
  bool covers(int order) const { return order <= end(); }
  // zero below start; throws above end
  Sequence at(int order) const;
  LaurentExpansion scaled_order(int s) const;  // multiply by eps^s
  std::string str() const;
};

// truncated Laurent series in eps over Q: sum c[i] eps^(start+i), exact through order end()
struct QSeries {
  int start = 0;
  std::vector<Q> c;

  int end() const { return start + static_cast<int>(c.size()) - 1; }
  Q at(int order) const;
  static QSeries zero(int start, int end);
  // expansion of a rational function in eps through order end
  static QSeries of(const RatFun& f, int end);
};

// product truncated at order end
QSeries series_mul(const QSeries& a, const QSeries& b, int end);
QSeries series_add(const QSeries& a, const QSeries& b, int end);

}  // namespace nestsolve
