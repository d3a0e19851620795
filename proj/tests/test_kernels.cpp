#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>
#include <omp.h>

#include "fastdiff/kernels.hpp"

namespace k = fastdiff::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = U(rng);
  return v;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{513}, std::size_t{100000}}) {
    const auto a = random_vector(n, 1), b = random_vector(n, 2), c = random_vector(n, 3), x = random_vector(n, 4);
    const auto w = random_vector(n, 5, 0.1, 2.0);
    std::vector<double> ys(n), yp(n);
    k::serial::tridiag_apply(a, b, c, x, ys);
    k::parallel::tridiag_apply(a, b, c, x, yp);
    CHECK(ys == yp);
    CHECK(k::serial::weighted_dot(a, b, w) == k::parallel::weighted_dot(a, b, w));
    CHECK(k::serial::weighted_abs_max(a, w) == k::parallel::weighted_abs_max(a, w));
    if (n <= 2000) CHECK(k::serial::holder_max(a, 0.01, 0.5) == k::parallel::holder_max(a, 0.01, 0.5));
  }
}

TEST_CASE("reductions do not depend on the thread count") {
  const auto a = random_vector(50000, 11), b = random_vector(50000, 12), w = random_vector(50000, 13, 0.5, 1.5);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = k::parallel::weighted_dot(a, b, w);
  omp_set_num_threads(std::max(2, saved));
  const double many = k::parallel::weighted_dot(a, b, w);
  omp_set_num_threads(saved);
  CHECK(one == many);
}

TEST_CASE("kernel values") {
  const std::vector<double> sub{0.0, 1.0, 1.0}, diag{-2.0, -2.0, -2.0}, sup{1.0, 1.0, 0.0}, x{1.0, 2.0, 3.0};
  std::vector<double> y(3);
  k::tridiag_apply(sub, diag, sup, x, y);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == -4.0);
  const std::vector<double> f{1.0, -3.0, 2.0}, wt{1.0, 0.5, 1.0};
  CHECK(k::weighted_abs_max(f, wt) == 2.0);
  CHECK(k::weighted_dot(f, f, wt) == 1.0 + 4.5 + 4.0);
  // |g_i - g_j| / |i-j|^alpha h^alpha; g = s on a unit grid with alpha = 1/2.
  std::vector<double> g(11);
  for (int i = 0; i <= 10; ++i) g[i] = 0.1 * i;
  CHECK(k::holder_max(g, 0.1, 0.5) == doctest::Approx(1.0));
}
