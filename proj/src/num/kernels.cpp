#include "lw/num/kernels.hpp"

#include <vector>

namespace lw::num::kernels {

void matmul(const double* a, const double* b, double* out, int n, int k, int m) {
  const std::size_t flops = static_cast<std::size_t>(n) * k * m;
#pragma omp parallel for schedule(static) if (flops >= kParallelMinFlops)
  for (int i = 0; i < n; ++i) {
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) row[j] = 0.0;
    const double* arow = a + static_cast<std::size_t>(i) * k;
    for (int r = 0; r < k; ++r) {
      const double av = arow[r];
      const double* brow = b + static_cast<std::size_t>(r) * m;
      for (int j = 0; j < m; ++j) row[j] += av * brow[j];
    }
  }
}

void matmul_nt(const double* a, const double* b, double* out, int n, int k, int m) {
  const std::size_t flops = static_cast<std::size_t>(n) * k * m;
#pragma omp parallel for schedule(static) if (flops >= kParallelMinFlops)
  for (int i = 0; i < n; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * k;
      double acc = 0.0;
      for (int r = 0; r < k; ++r) acc += arow[r] * brow[r];
      row[j] = acc;
    }
  }
}

void matmul_tn(const double* a, const double* c, double* out, int n, int k, int m) {
  const std::size_t flops = static_cast<std::size_t>(n) * k * m;
#pragma omp parallel for schedule(static) if (flops >= kParallelMinFlops)
  for (int i = 0; i < k; ++i) {
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) row[j] = 0.0;
    for (int r = 0; r < n; ++r) {
      const double av = a[static_cast<std::size_t>(r) * k + i];
      const double* crow = c + static_cast<std::size_t>(r) * m;
      for (int j = 0; j < m; ++j) row[j] += av * crow[j];
    }
  }
}

double sum(const double* x, std::size_t n) {
  if (n <= kSumBlock) return ref::sum(x, n);
  const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i];
    partial[b] = acc;
  }
  double total = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) total += partial[b];
  return total;
}

void axpy(double c, const double* x, double* out, std::size_t n) {
#pragma omp parallel for schedule(static) if (n >= kParallelMinElems)
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] += c * x[i];
}

namespace ref {

void matmul(const double* a, const double* b, double* out, int n, int k, int m) {
  for (int i = 0; i < n; ++i) {
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) row[j] = 0.0;
    const double* arow = a + static_cast<std::size_t>(i) * k;
    for (int r = 0; r < k; ++r) {
      const double av = arow[r];
      const double* brow = b + static_cast<std::size_t>(r) * m;
      for (int j = 0; j < m; ++j) row[j] += av * brow[j];
    }
  }
}

void matmul_nt(const double* a, const double* b, double* out, int n, int k, int m) {
  for (int i = 0; i < n; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * k;
      double acc = 0.0;
      for (int r = 0; r < k; ++r) acc += arow[r] * brow[r];
      row[j] = acc;
    }
  }
}

void matmul_tn(const double* a, const double* c, double* out, int n, int k, int m) {
  for (int i = 0; i < k; ++i) {
    double* row = out + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) row[j] = 0.0;
    for (int r = 0; r < n; ++r) {
      const double av = a[static_cast<std::size_t>(r) * k + i];
      const double* crow = c + static_cast<std::size_t>(r) * m;
      for (int j = 0; j < m; ++j) row[j] += av * crow[j];
    }
  }
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace ref

}  // namespace lw::num::kernels
