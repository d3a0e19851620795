#include <cmath>
#include <limits>

#include "fastdiff/error.hpp"
#include "fastdiff/geometry.hpp"
#include "fastdiff/kernels.hpp"

namespace fastdiff {

namespace {

void require_same(const GridFunction& f, const GridFunction& g) {
  if (f.grid.count != g.grid.count || f.grid.s_max != g.grid.s_max)
    throw ValidationError("grid functions live on different grids");
  if (f.ell != g.ell) throw ValidationError("grid functions ride on different harmonics");
}

std::vector<double> cosh_power(const RadialGrid& grid, double e) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) w[static_cast<std::size_t>(i)] = std::pow(std::cosh(grid.node(i)), e);
  return w;
}

}  // namespace

std::vector<double> trapezoid_weights(const RadialGrid& grid, int n) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  const double h = grid.h();
  for (int i = 0; i < grid.size(); ++i) w[static_cast<std::size_t>(i)] = h * volume_weight(grid.node(i), n);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double integrate_cigar(const GridFunction& f, int n) {
  const auto w = trapezoid_weights(f.grid, n);
  const std::vector<double> ones(w.size(), 1.0);
  return kernels::weighted_dot(f.values, ones, w);
}

QuadratureResult integrate_cigar_with_tail(const GridFunction& f, int n) {
  const double value = integrate_cigar(f, n);
  const std::size_t N = f.values.size() - 1;
  const double h = f.grid.h();
  const double a = f.values[N] * volume_weight(f.grid.node(static_cast<int>(N)), n);
  const double b = f.values[N - 1] * volume_weight(f.grid.node(static_cast<int>(N) - 1), n);
  double tail = 0.0;
  if (a != 0.0) {
    const double ratio = std::abs(a / b);
    tail = (b != 0.0 && ratio < 1.0) ? std::abs(a) * h / -std::log(ratio)
                                     : std::numeric_limits<double>::infinity();
  }
  return {value, tail};
}

double inner_product_uBm(const GridFunction& f, const GridFunction& g, const ModelParams& P) {
  require_same(f, g);
  auto w = trapezoid_weights(f.grid, P.n);
  const auto c = cosh_power(f.grid, -2.0 * P.eta_cr);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= c[i];
  // u_B^m r^{n-1} dr scales by B^{n/2 - a + 1} under r = sqrt(B) sinh s.
  const double scale = std::pow(P.B, 0.5 * P.n - P.a() + 1.0);
  return scale * kernels::weighted_dot(f.values, g.values, w);
}

double weighted_sup(const GridFunction& f, double eta) {
  return kernels::weighted_abs_max(f.values, cosh_power(f.grid, -eta));
}

double holder_seminorm(const GridFunction& f, const NormSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ValidationError("Hoelder exponent must lie in ]0,1[");
  const auto w = cosh_power(f.grid, -spec.eta);
  std::vector<double> g(f.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = w[i] * f.values[i];
  return kernels::holder_max(g, f.grid.h(), spec.alpha);
}

double norm(const GridFunction& f, const NormSpec& spec, const ModelParams& P) {
  switch (spec.kind) {
    case NormSpec::Kind::weighted_sup: return weighted_sup(f, spec.eta);
    case NormSpec::Kind::weighted_holder: return weighted_sup(f, spec.eta) + holder_seminorm(f, spec);
    case NormSpec::Kind::l2_cigar: {
      GridFunction sq = f;
      for (double& v : sq.values) v *= v;
      return std::sqrt(integrate_cigar(sq, P.n));
    }
    case NormSpec::Kind::l2_uBm: return std::sqrt(inner_product_uBm(f, f, P));
  }
  return 0.0;
}

}  // namespace fastdiff
