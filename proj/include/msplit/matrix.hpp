#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace msplit {

/// Dense arbitrary-precision integer matrix, stored column-major so that a
/// basis vector is one contiguous std::vector<mpz_class>.
struct BigMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<mpz_class>> col;  // col[j][i]

  BigMatrix() = default;
  BigMatrix(int rows_, int cols_) : rows(rows_), cols(cols_) {
    if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("BigMatrix dimensions must be positive");
    col.assign(cols_, std::vector<mpz_class>(rows_, mpz_class(0)));
  }

  mpz_class& at(int i, int j) { return col[j][i]; }
  const mpz_class& at(int i, int j) const { return col[j][i]; }

  bool operator==(const BigMatrix& o) const { return rows == o.rows && cols == o.cols && col == o.col; }
};

/// Exact Gram matrix B^T B.
inline BigMatrix gram_matrix(const BigMatrix& b) {
  BigMatrix g(b.cols, b.cols);
  mpz_class acc;
  for (int i = 0; i < b.cols; ++i)
    for (int j = i; j < b.cols; ++j) {
      acc = 0;
      for (int k = 0; k < b.rows; ++k) acc += b.col[i][k] * b.col[j][k];
      g.at(i, j) = acc;
      g.at(j, i) = acc;
    }
  return g;
}

/// Exact determinant by Bareiss fraction-free elimination (all divisions exact).
inline mpz_class determinant(const BigMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("determinant needs a square matrix");
  const int n = a.rows;
  std::vector<std::vector<mpz_class>> w(n, std::vector<mpz_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i][j] = a.at(i, j);

  mpz_class prev(1);
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (w[k][k] == 0) {
      int p = k + 1;
      while (p < n && w[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(w[k], w[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        w[i][j] = w[i][j] * w[k][k] - w[i][k] * w[k][j];
        mpz_divexact(w[i][j].get_mpz_t(), w[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = w[k][k];
  }
  return sign > 0 ? w[n - 1][n - 1] : mpz_class(-w[n - 1][n - 1]);
}

}  // namespace msplit
