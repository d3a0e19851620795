#pragma once
// Data-parallel kernels. Each has an OpenMP version and a serial reference
// with identical results; reductions use a fixed chunking so the parallel
// sums do not depend on the thread count.

#include <cstddef>
#include <span>

namespace fastdiff::kernels {

// Chunk length for deterministic reductions.
inline constexpr std::size_t kChunk = 512;

namespace serial {
void tridiag_apply(std::span<const double> sub, std::span<const double> diag,
                   std::span<const double> sup, std::span<const double> x, std::span<double> y);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
double weighted_abs_max(std::span<const double> f, std::span<const double> weight);
double holder_max(std::span<const double> g, double h, double alpha);
}  // namespace serial

namespace parallel {
void tridiag_apply(std::span<const double> sub, std::span<const double> diag,
                   std::span<const double> sup, std::span<const double> x, std::span<double> y);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
double weighted_abs_max(std::span<const double> f, std::span<const double> weight);
double holder_max(std::span<const double> g, double h, double alpha);
}  // namespace parallel

// Default entry points dispatch to the parallel versions.
using parallel::holder_max;
using parallel::tridiag_apply;
using parallel::weighted_abs_max;
using parallel::weighted_dot;

}  // namespace fastdiff::kernels
