// Serial reference vs OpenMP kernels: wall time and agreement.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "fastdiff/kernels.hpp"

namespace k = fastdiff::kernels;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, std::size_t n, double ts, double tp, double diff) {
  std::printf("%-18s n=%-9zu serial %10.3f ms  parallel %10.3f ms  speedup %6.2fx  max|diff| %.3g\n", name, n,
              1e3 * ts, 1e3 * tp, ts / tp, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t n : {std::size_t{1} << 12, std::size_t{1} << 16, std::size_t{1} << 20, std::size_t{1} << 22}) {
    std::vector<double> a(n), b(n), c(n), x(n), w(n), ys(n), yp(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
      c[i] = U(rng);
      x[i] = U(rng);
      w[i] = 0.5 + 0.5 * std::abs(U(rng));
    }
    const int r = n > (1u << 20) ? std::max(1, reps / 2) : reps;

    double ts = best_of(r, [&] { k::serial::tridiag_apply(a, b, c, x, ys); });
    double tp = best_of(r, [&] { k::parallel::tridiag_apply(a, b, c, x, yp); });
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(ys[i] - yp[i]));
    report("tridiag_apply", n, ts, tp, diff);

    double vs = 0.0, vp = 0.0;
    ts = best_of(r, [&] { vs = k::serial::weighted_dot(a, b, w); });
    tp = best_of(r, [&] { vp = k::parallel::weighted_dot(a, b, w); });
    report("weighted_dot", n, ts, tp, std::abs(vs - vp));

    ts = best_of(r, [&] { vs = k::serial::weighted_abs_max(a, w); });
    tp = best_of(r, [&] { vp = k::parallel::weighted_abs_max(a, w); });
    report("weighted_abs_max", n, ts, tp, std::abs(vs - vp));
  }
  // O(n^2) seminorm on smaller sizes.
  for (std::size_t n : {std::size_t{1} << 12, std::size_t{1} << 14}) {
    std::vector<double> g(n);
    for (double& v : g) v = U(rng);
    const double h = 1.0 / static_cast<double>(n);
    double vs = 0.0, vp = 0.0;
    const double ts = best_of(reps, [&] { vs = k::serial::holder_max(g, h, 0.5); });
    const double tp = best_of(reps, [&] { vp = k::parallel::holder_max(g, h, 0.5); });
    report("holder_max", n, ts, tp, std::abs(vs - vp));
  }
  return 0;
}
