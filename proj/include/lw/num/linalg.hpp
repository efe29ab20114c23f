#pragma once

#include <vector>

namespace lw::num::linalg {

// Row-major square/rectangular dense helpers for the small (d <= 64) systems
// in the oracles and metrics. All matrices are std::vector<double> row-major.

struct Cholesky {
  int n = 0;
  std::vector<double> l;  // lower triangular, row-major

  // solve L L^T x = b
  std::vector<double> solve(const std::vector<double>& b) const;
  double logdet() const;  // log det(A) = 2 sum log L_ii
};

// A must be symmetric positive definite; throws otherwise.
Cholesky cholesky(const std::vector<double>& a, int n);

// Symmetric eigendecomposition by cyclic Jacobi. Returns eigenvalues
// ascending; v (n x n, row-major) holds eigenvectors in columns.
void jacobi_eigh(const std::vector<double>& a, int n, std::vector<double>& eigenvalues,
                 std::vector<double>& v);

// Least squares min ||A x - b|| via normal equations with a small ridge.
// a is (rows x cols), b is (rows); returns x (cols).
std::vector<double> lstsq(const std::vector<double>& a, const std::vector<double>& b, int rows,
                          int cols, double ridge = 0.0);

// c = a (n x k) * b (k x m)
std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, int n,
                           int k, int m);

// symmetric inverse square root via eigendecomposition
std::vector<double> inv_sqrt_sym(const std::vector<double>& a, int n);

}  // namespace lw::num::linalg
