#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/kernels.hpp"
#include "step_internal.hpp"

namespace fastdiff {

namespace detail {

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

double mass_factor(const ModelParams& P) { return sphere_area(P.n) * std::pow(P.B, 0.5 * P.n - P.a()); }

}  // namespace detail

namespace {

void require_radial(const GridFunction& w) {
  if (w.ell != 0) throw ValidationError("expected radial (ell = 0) data");
  validate(w);
}

}  // namespace

MassMoments mass_and_moments(const GridFunction& w, const ModelParams& P) {
  require_radial(w);
  const RadialScheme scheme(w.grid, P);
  const std::vector<double>& M = scheme.cell_mass();
  const double f = detail::mass_factor(P);
  MassMoments out;
  std::vector<double> r2(M.size());
  for (std::size_t i = 0; i < M.size(); ++i) {
    const double sh = std::sinh(w.grid.node(static_cast<int>(i)));
    r2[i] = P.B * sh * sh;
  }
  const std::vector<double> ones(M.size(), 1.0);
  out.mass_defect = f * kernels::weighted_dot(w.values, ones, M);
  out.second_moment_finite = P.p > 2.0;
  out.second_moment = out.second_moment_finite ? f * kernels::weighted_dot(w.values, r2, M)
                                               : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double energy(const GridFunction& w, const ModelParams& P) {
  require_radial(w);
  GridFunction H = w;
  for (double& x : H.values) x = energy_density(x, P.m);
  return detail::sphere_area(P.n) * integrate_cigar(H, P.n);
}

Envelope comparison_envelope(const GridFunction& w0, const ModelParams& P) {
  require_radial(w0);
  double lo = 1e300, hi = -1e300;
  for (double x : w0.values) {
    lo = std::min(lo, 1.0 + x);
    hi = std::max(hi, 1.0 + x);
  }
  if (!(lo > 0.0)) throw ValidationError("comparison envelope needs positive initial data");
  // Barriers are the Barenblatt rescalings that equal c and 1/c identically
  // at t = 0; they relax to c^{+-2 beta}.
  const double c = std::max(hi, 1.0 / lo);
  const double e = 2.0 * P.beta;
  return {std::pow(c, -e), std::pow(c, e)};
}

namespace {

// Removes the v_00 component measured in the scheme's cell masses.
void remove_discrete_mass(GridFunction& w, const ModelParams& P) {
  const RadialScheme scheme(w.grid, P);
  const std::vector<double>& M = scheme.cell_mass();
  const GridFunction v00 = sample(w.grid, 0, [&](double s) { return eigenfunction_v({0, 0, 0}, s, P); });
  const std::vector<double> ones(M.size(), 1.0);
  const double c = kernels::weighted_dot(w.values, ones, M) / kernels::weighted_dot(v00.values, ones, M);
  for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] -= c * v00.values[i];
}

}  // namespace

GridFunction eigenmode_data(const RadialGrid& grid, int k, double amplitude, const ModelParams& P) {
  const ModeIndex md{0, k, 0};
  if (k < 0 || (!is_admissible(md, 0.0, P) && !is_admissible(md, P.eta_cr, P)))
    throw ValidationError("radial mode index k is not admissible");
  GridFunction w = sample(grid, 0, [&](double s) { return amplitude * eigenfunction_v(md, s, P); });
  // k >= 1 modes carry no mass; drop the quadrature remainder.
  if (k >= 1) remove_discrete_mass(w, P);
  return w;
}

GridFunction bump_data(const RadialGrid& grid, double amplitude, std::uint64_t seed, const ModelParams& P,
                       bool project_mass) {
  if (!(amplitude > 0.0)) throw ValidationError("amplitude must be > 0");
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  constexpr int kBumps = 3;
  double centre[kBumps], width[kBumps], weight[kBumps];
  for (int j = 0; j < kBumps; ++j) {
    centre[j] = 0.2 + 2.8 * uniform();
    width[j] = 0.3 + 0.7 * uniform();
    weight[j] = 2.0 * uniform() - 1.0;
  }
  GridFunction w = sample(grid, 0, [&](double s) {
    double v = 0.0;
    for (int j = 0; j < kBumps; ++j) {
      const double z = (s - centre[j]) / width[j];
      v += weight[j] * std::exp(-z * z);
    }
    return v;
  });
  if (project_mass) remove_discrete_mass(w, P);
  const double sup = weighted_sup(w, 0.0);
  if (!(sup > 0.0)) throw ValidationError("bump data vanished");
  for (double& x : w.values) x *= amplitude / sup;
  return w;
}

GridFunction delayed_barenblatt_data(const RadialGrid& grid, double t, double tau0, double Bplus,
                                     const ModelParams& P) {
  return sample(grid, 0, [&](double s) { return delayed_barenblatt_w(t, s, tau0, Bplus, P); });
}

}  // namespace fastdiff
