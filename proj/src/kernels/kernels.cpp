#include "fastdiff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fastdiff::kernels {

namespace {

inline double row(std::span<const double> sub, std::span<const double> diag,
                  std::span<const double> sup, std::span<const double> x, std::size_t i) {
  const std::size_t n = x.size();
  double v = diag[i] * x[i];
  if (i > 0) v += sub[i] * x[i - 1];
  if (i + 1 < n) v += sup[i] * x[i + 1];
  return v;
}

std::vector<double> inverse_distance_powers(std::size_t n, double h, double alpha) {
  std::vector<double> t(n, 0.0);
  for (std::size_t d = 1; d < n; ++d) t[d] = std::pow(static_cast<double>(d) * h, -alpha);
  return t;
}

double holder_row(std::span<const double> g, const std::vector<double>& inv, std::size_t i) {
  double best = 0.0;
  for (std::size_t j = i + 1; j < g.size(); ++j)
    best = std::max(best, std::abs(g[i] - g[j]) * inv[j - i]);
  return best;
}

}  // namespace

namespace serial {

void tridiag_apply(std::span<const double> sub, std::span<const double> diag,
                   std::span<const double> sup, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = row(sub, diag, sup, x, i);
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  // Same chunked association as the parallel version.
  double total = 0.0;
  for (std::size_t start = 0; start < a.size(); start += kChunk) {
    const std::size_t stop = std::min(a.size(), start + kChunk);
    double part = 0.0;
    for (std::size_t i = start; i < stop; ++i) part += a[i] * b[i] * w[i];
    total += part;
  }
  return total;
}

double weighted_abs_max(std::span<const double> f, std::span<const double> weight) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, std::abs(f[i] * weight[i]));
  return best;
}

double holder_max(std::span<const double> g, double h, double alpha) {
  const auto inv = inverse_distance_powers(g.size(), h, alpha);
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) best = std::max(best, holder_row(g, inv, i));
  return best;
}

}  // namespace serial

namespace parallel {

void tridiag_apply(std::span<const double> sub, std::span<const double> diag,
                   std::span<const double> sup, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = row(sub, diag, sup, x, static_cast<std::size_t>(i));
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
  std::vector<double> parts(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t start = static_cast<std::size_t>(c) * kChunk;
    const std::size_t stop = std::min(a.size(), start + kChunk);
    double part = 0.0;
    for (std::size_t i = start; i < stop; ++i) part += a[i] * b[i] * w[i];
    parts[static_cast<std::size_t>(c)] = part;
  }
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

double weighted_abs_max(std::span<const double> f, std::span<const double> weight) {
  double best = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) best = std::max(best, std::abs(f[i] * weight[i]));
  return best;
}

double holder_max(std::span<const double> g, double h, double alpha) {
  const auto inv = inverse_distance_powers(g.size(), h, alpha);
  double best = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for reduction(max : best) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    best = std::max(best, holder_row(g, inv, static_cast<std::size_t>(i)));
  return best;
}

}  // namespace parallel

}  // namespace fastdiff::kernels
