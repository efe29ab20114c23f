// Timing comparison of the OpenMP kernels against the serial reference.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "lw/num/kernels.hpp"
#include "lw/num/prng.hpp"

using namespace lw::num;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void bench_matmul(int n) {
  PrngStream s(1, 0);
  std::vector<double> a(static_cast<std::size_t>(n) * n), b = a, out = a;
  for (auto& v : a) v = s.uniform(-1.0, 1.0);
  for (auto& v : b) v = s.uniform(-1.0, 1.0);

  const double flops = 2.0 * n * static_cast<double>(n) * n;
  const int reps = n <= 128 ? 20 : 5;
  const double t_ref =
      time_best_of(reps, [&] { kernels::ref::matmul(a.data(), b.data(), out.data(), n, n, n); });
  const double t_par =
      time_best_of(reps, [&] { kernels::matmul(a.data(), b.data(), out.data(), n, n, n); });
  std::printf("matmul %4dx%-4d  serial %8.2f ms (%6.2f GFLOP/s)   openmp %8.2f ms (%6.2f GFLOP/s)   speedup %.2fx\n",
              n, n, 1e3 * t_ref, flops / t_ref / 1e9, 1e3 * t_par, flops / t_par / 1e9,
              t_ref / t_par);
}

void bench_sum(std::size_t n) {
  PrngStream s(2, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = s.uniform(-1.0, 1.0);
  volatile double sink = 0.0;
  const double t_ref = time_best_of(20, [&] { sink = kernels::ref::sum(x.data(), n); });
  const double t_par = time_best_of(20, [&] { sink = kernels::sum(x.data(), n); });
  (void)sink;
  std::printf("sum    n=%-9zu serial %8.3f ms                 openmp %8.3f ms                 speedup %.2fx\n",
              n, 1e3 * t_ref, 1e3 * t_par, t_ref / t_par);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  for (int n : {64, 128, 256, 512}) bench_matmul(n);
  for (std::size_t n : {std::size_t{100000}, std::size_t{1000000}, std::size_t{10000000}})
    bench_sum(n);
  return 0;
}
