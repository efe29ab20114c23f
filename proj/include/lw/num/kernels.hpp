#pragma once

#include <cstddef>

// Low-level dense kernels. The production entry points are OpenMP-parallel
// above a size threshold and are bit-deterministic for any thread count:
// every output element is produced by a fixed serial recurrence, and
// reductions use a fixed block decomposition that does not depend on the
// number of threads. kernels::ref holds the single-threaded naive versions
// kept as the reference implementation for tests and benchmarks.

namespace lw::num::kernels {

inline constexpr std::size_t kParallelMinElems = 32768;
inline constexpr std::size_t kParallelMinFlops = 131072;
inline constexpr std::size_t kSumBlock = 4096;

// out[n,m] = a[n,k] * b[k,m]
void matmul(const double* a, const double* b, double* out, int n, int k, int m);
// out[n,m] = a[n,k] * b[m,k]^T
void matmul_nt(const double* a, const double* b, double* out, int n, int k, int m);
// out[k,m] = a[n,k]^T * c[n,m]
void matmul_tn(const double* a, const double* c, double* out, int n, int k, int m);

double sum(const double* x, std::size_t n);

template <class F>
void apply_unary(const double* x, double* out, std::size_t n, F f) {
#pragma omp parallel for schedule(static) if (n >= kParallelMinElems)
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] = f(x[i]);
}

template <class F>
void apply_binary(const double* a, const double* b, double* out, std::size_t n, F f) {
#pragma omp parallel for schedule(static) if (n >= kParallelMinElems)
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] = f(a[i], b[i]);
}

// out[i] += c * x[i]
void axpy(double c, const double* x, double* out, std::size_t n);

namespace ref {

void matmul(const double* a, const double* b, double* out, int n, int k, int m);
void matmul_nt(const double* a, const double* b, double* out, int n, int k, int m);
void matmul_tn(const double* a, const double* c, double* out, int n, int k, int m);
double sum(const double* x, std::size_t n);

}  // namespace ref

}  // namespace lw::num::kernels
