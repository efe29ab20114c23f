#include "lw/num/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lw::num::linalg {

Cholesky cholesky(const std::vector<double>& a, int n) {
  if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("cholesky: bad size");
  Cholesky ch;
  ch.n = n;
  ch.l.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        s -= ch.l[static_cast<std::size_t>(i) * n + k] * ch.l[static_cast<std::size_t>(j) * n + k];
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
        ch.l[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
      } else {
        ch.l[static_cast<std::size_t>(i) * n + j] = s / ch.l[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  return ch;
}

std::vector<double> Cholesky::solve(const std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cholesky solve: bad size");
  std::vector<double> y(b.size());
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * n + k] * y[k];
    y[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  std::vector<double> x(b.size());
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k) * n + i] * x[k];
    x[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  return x;
}

double Cholesky::logdet() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log(l[static_cast<std::size_t>(i) * n + i]);
  return 2.0 * s;
}

void jacobi_eigh(const std::vector<double>& a_in, int n, std::vector<double>& eigenvalues,
                 std::vector<double>& v) {
  if (static_cast<int>(a_in.size()) != n * n) throw std::invalid_argument("jacobi_eigh: bad size");
  std::vector<double> a = a_in;
  v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto at = [&](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<std::size_t>(i) * n + j];
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(a, k, p), akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(a, p, k), aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a[static_cast<std::size_t>(i) * n + i];

  // sort ascending, permuting eigenvector columns alongside
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int x, int y) { return eigenvalues[x] < eigenvalues[y]; });
  std::vector<double> ev(n);
  std::vector<double> vv(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    ev[j] = eigenvalues[idx[j]];
    for (int i = 0; i < n; ++i)
      vv[static_cast<std::size_t>(i) * n + j] = v[static_cast<std::size_t>(i) * n + idx[j]];
  }
  eigenvalues = std::move(ev);
  v = std::move(vv);
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, int n,
                           int k, int m) {
  std::vector<double> c(static_cast<std::size_t>(n) * m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < k; ++r) {
      const double av = a[static_cast<std::size_t>(i) * k + r];
      for (int j = 0; j < m; ++j)
        c[static_cast<std::size_t>(i) * m + j] += av * b[static_cast<std::size_t>(r) * m + j];
    }
  return c;
}

std::vector<double> lstsq(const std::vector<double>& a, const std::vector<double>& b, int rows,
                          int cols, double ridge) {
  // normal equations A^T A x = A^T b
  std::vector<double> ata(static_cast<std::size_t>(cols) * cols, 0.0);
  std::vector<double> atb(static_cast<std::size_t>(cols), 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * cols;
    for (int i = 0; i < cols; ++i) {
      atb[i] += row[i] * b[r];
      for (int j = 0; j <= i; ++j) ata[static_cast<std::size_t>(i) * cols + j] += row[i] * row[j];
    }
  }
  for (int i = 0; i < cols; ++i) {
    for (int j = i + 1; j < cols; ++j)
      ata[static_cast<std::size_t>(i) * cols + j] = ata[static_cast<std::size_t>(j) * cols + i];
    ata[static_cast<std::size_t>(i) * cols + i] += ridge;
  }
  return cholesky(ata, cols).solve(atb);
}

std::vector<double> inv_sqrt_sym(const std::vector<double>& a, int n) {
  std::vector<double> evals, v;
  jacobi_eigh(a, n, evals, v);
  for (double e : evals)
    if (e <= 0.0) throw std::runtime_error("inv_sqrt_sym: matrix not positive definite");
  // V diag(1/sqrt(e)) V^T
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += v[static_cast<std::size_t>(i) * n + k] * v[static_cast<std::size_t>(j) * n + k] /
             std::sqrt(evals[k]);
      out[static_cast<std::size_t>(i) * n + j] = s;
    }
  return out;
}

}  // namespace lw::num::linalg
