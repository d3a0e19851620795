#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastdiff/asymptotics.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/kernels.hpp"

namespace fastdiff {

namespace {

void require_radial_mode(const ModeIndex& mode, const ModelParams& P) {
  if (mode.ell != 0) throw ValidationError("radial traces carry only ell = 0 coefficients");
  if (!(mode.ell + 2 * mode.k < P.p)) {
    std::ostringstream os;
    os << "pairing with psi_(" << mode.ell << "," << mode.k << ") is not integrable (l + 2k >= p = " << P.p << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace

double coefficient_at(const RadialGrid& grid, const std::vector<double>& w, double t, const ModeIndex& mode,
                      const ModelParams& P, double* tail) {
  require_radial_mode(mode, P);
  const RadialScheme scheme(grid, P);
  const std::vector<double>& M = scheme.cell_mass();
  const PsiPolynomial poly = psi_polynomial(mode, P);
  std::vector<double> psi(M.size()), den(M.size());
  for (std::size_t i = 0; i < M.size(); ++i) {
    const double s = grid.node(static_cast<int>(i));
    const double r = std::sqrt(P.B) * std::sinh(s);
    psi[i] = eval_psi(poly, r, P);
    const double c = std::cosh(s);
    den[i] = psi[i] * psi[i] / (P.B * c * c);  // u_B^{1-m} psi^2
  }
  const std::vector<double> ones(M.size(), 1.0);
  const double num = kernels::weighted_dot(w, psi, M);
  const double norm = kernels::weighted_dot(den, ones, M);
  if (tail) {
    // Power-law tail u_B w psi r^{n-1} ~ r^{-alpha-1} beyond r_max.
    const std::size_t N = M.size() - 1;
    const double alpha = P.p - mode.ell - 2.0 * mode.k;
    const double dens = M[N] / (0.5 * grid.h()) * std::abs(w[N] * psi[N]);  // per unit s
    const double bound = dens / alpha;                                       // integrand ~ e^{-alpha s}
    *tail = std::abs(num) > 0.0 ? bound / std::abs(num) : (bound > 0.0 ? INFINITY : 0.0);
  }
  return std::exp(-eigenvalue(mode, P) * t) * num / norm;
}

CoefficientRecord extract_coefficient(const EvolutionTrace& trace, const ModeIndex& mode, const ModelParams& P) {
  require_radial_mode(mode, P);
  if (trace.snapshots.empty()) throw ValidationError("coefficient extraction needs snapshots");
  CoefficientRecord rec;
  rec.mode = mode;
  for (const Snapshot& snap : trace.snapshots) {
    double sup = 0.0;
    for (double x : snap.w) sup = std::max(sup, std::abs(x));
    if (sup < kNoiseFloor && !rec.estimates.empty()) continue;
    double tail = 0.0;
    const double c = coefficient_at(trace.grid, snap.w, snap.t, mode, P, &tail);
    rec.estimates.emplace_back(snap.t, c);
    rec.tail_bound = std::max(rec.tail_bound, std::isfinite(tail) ? tail : 0.0);
  }
  const std::size_t K = rec.estimates.size();
  const std::size_t start = K - std::max<std::size_t>(1, K / 3);
  double sum = 0.0, lo = 1e300, hi = -1e300;
  for (std::size_t i = start; i < K; ++i) {
    const double c = rec.estimates[i].second;
    sum += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  rec.limit = sum / static_cast<double>(K - start);
  rec.converged = (hi - lo) <= kCoefficientTolerance * std::abs(rec.limit);
  rec.tail_flagged = rec.tail_bound > 0.01;
  return rec;
}

std::vector<double> shifted_error(const RadialGrid& grid, const std::vector<double>& w, double t, double tau0,
                                  const ModelParams& P) {
  std::vector<double> z(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wb = delayed_barenblatt_w(t, grid.node(static_cast<int>(i)), tau0, P.B, P);
    z[i] = (w[i] - wb) / (1.0 + wb);
  }
  return z;
}

TimeShiftResult mod_time_shift(const EvolutionTrace& trace, const ModelParams& P, std::optional<double> Lambda,
                               const WindowPolicy& policy) {
  if (trace.snapshots.size() < 2) throw ValidationError("time-shift modding needs snapshots");
  const ModeIndex m01{0, 1, 0};
  require_radial_mode(m01, P);
  TimeShiftResult res;
  res.lambda01 = eigenvalue(m01, P);
  res.Lambda = Lambda.value_or(default_target_rate(P));
  res.eta = eta_for_target_rate(res.Lambda, P);

  // Evaluate c_01 at the last snapshot that is well above the noise floor.
  const Snapshot* eval = &trace.snapshots.front();
  for (const Snapshot& snap : trace.snapshots) {
    double sup = 0.0;
    for (double x : snap.w) sup = std::max(sup, std::abs(x));
    if (sup >= 1e-6) eval = &snap;
  }
  res.eval_time = eval->t;
  auto c_of = [&](double tau0) {
    return coefficient_at(trace.grid, shifted_error(trace.grid, eval->w, eval->t, tau0, P), eval->t, m01, P);
  };

  // c_01 is affine in tau0 to leading order; a few secant steps absorb the rest.
  double x0 = 0.0, c0 = c_of(x0);
  double x1 = 1e-3, c1 = c_of(x1);
  const double scale = std::abs(c0);
  for (int it = 0; it < 8; ++it) {
    const double slope = (c1 - c0) / (x1 - x0);
    if (!(std::abs(slope) > 1e-14 * (1.0 + scale))) throw SolverError("time-shift equation is degenerate (dc/dtau0 ~ 0)");
    res.c_slope = slope;
    const double x2 = x1 - c1 / slope;
    x0 = x1;
    c0 = c1;
    x1 = x2;
    c1 = c_of(x1);
    if (std::abs(c1) <= 1e-12 * std::max(scale, 1e-300) || std::abs(x1 - x0) <= 1e-15) break;
  }
  res.tau0 = x1;

  std::vector<double> weight(trace.grid.size());
  for (int i = 0; i < trace.grid.size(); ++i) weight[i] = std::pow(std::cosh(trace.grid.node(i)), -res.eta);
  for (const Snapshot& snap : trace.snapshots) {
    const std::vector<double> z = shifted_error(trace.grid, snap.w, snap.t, res.tau0, P);
    res.times.push_back(snap.t);
    res.norms.push_back(kernels::weighted_abs_max(z, weight));
  }
  res.shifted_rate = fit_rate(res.times, res.norms, policy);
  return res;
}

}  // namespace fastdiff
