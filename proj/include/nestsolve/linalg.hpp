#pragma once
#include <optional>
#include <utility>
#include <vector>

namespace nestsolve {

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
bool is_zero_elem(const T& x) {
  return x == T(0);
}

// Row echelon form in place; returns pivot columns.
template <class T>
std::vector<int> row_reduce(Matrix<T>& m, int ncols) {
  std::vector<int> piv;
  int rows = static_cast<int>(m.size());
  int r = 0;
  for (int c = 0; c < ncols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (!is_zero_elem(m[i][c])) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[r], m[p]);
    T inv = T(1) / m[r][c];
    for (auto& x : m[r]) x = x * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || is_zero_elem(m[i][c])) continue;
      T f = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j)
        if (!is_zero_elem(m[r][j])) m[i][j] = m[i][j] - f * m[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

// basis of {v : m v = 0}
template <class T>
std::vector<std::vector<T>> nullspace(Matrix<T> m, int ncols) {
  auto piv = row_reduce(m, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<std::vector<T>> out;
  for (int f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    std::vector<T> v(ncols, T(0));
    v[f] = T(1);
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = T(0) - m[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

// solves m x = b; nullopt if inconsistent; free variables set to zero
template <class T>
std::optional<std::vector<T>> solve_linear(const Matrix<T>& m, const std::vector<T>& b, int ncols) {
  Matrix<T> a = m;
  for (std::size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
  auto piv = row_reduce(a, ncols);
  for (std::size_t r = piv.size(); r < a.size(); ++r)
    if (!is_zero_elem(a[r][ncols])) return std::nullopt;
  std::vector<T> x(ncols, T(0));
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = a[r][ncols];
  return x;
}

template <class T>
int rank(Matrix<T> m, int ncols) {
  return static_cast<int>(row_reduce(m, ncols).size());
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& m) {
  int n = static_cast<int>(m.size());
  Matrix<T> a = m;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i].push_back(i == j ? T(1) : T(0));
  auto piv = row_reduce(a, n);
  if (static_cast<int>(piv.size()) < n) return std::nullopt;
  Matrix<T> inv(n);
  for (int i = 0; i < n; ++i) inv[i].assign(a[i].begin() + n, a[i].end());
  return inv;
}

}  // namespace nestsolve
