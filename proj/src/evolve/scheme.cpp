#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "step_internal.hpp"

namespace fastdiff {

namespace {

constexpr double kSeriesCut = 0.05;

double log_cosh(double s) { return s + std::log1p(std::exp(-2.0 * s)) - std::log(2.0); }

void check_positive(const std::vector<double>& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(1.0 + w[i] > 0.0)) {
      std::ostringstream os;
      os << "relative density lost positivity at node " << i << " (v = " << 1.0 + w[i] << ")";
      throw SolverError(os.str());
    }
  }
}

// Solves a tridiagonal system in place (no pivoting; the backward-Euler
// Jacobian is close to an M-matrix).
bool thomas(std::vector<double>& lo, std::vector<double>& dg, std::vector<double>& up, std::vector<double>& b) {
  const std::size_t M = dg.size();
  for (std::size_t i = 1; i < M; ++i) {
    if (!(std::abs(dg[i - 1]) > 1e-300)) return false;
    const double f = lo[i] / dg[i - 1];
    dg[i] -= f * up[i - 1];
    b[i] -= f * b[i - 1];
  }
  if (!(std::abs(dg[M - 1]) > 1e-300)) return false;
  b[M - 1] /= dg[M - 1];
  for (std::size_t i = M - 1; i-- > 0;) b[i] = (b[i] - up[i] * b[i + 1]) / dg[i];
  return true;
}

}  // namespace

double h_of_w(double w, double m) { return std::expm1(m * std::log1p(w)) / m; }

double reaction_of_w(double w, double m) {
  if (std::abs(w) < kSeriesCut) {
    // w - sum_{k>=1} C(m,k) w^k
    double term = m, sum = 0.0;
    double wk = w;
    for (int k = 1; k < 40; ++k) {
      sum += term * wk;
      term *= (m - k) / (k + 1.0);
      wk *= w;
      if (std::abs(term * wk) < 1e-19 * std::abs(sum)) break;
    }
    return w - sum;
  }
  return w - std::expm1(m * std::log1p(w));
}

double energy_density(double w, double m) {
  if (!(1.0 + w > 0.0)) throw SolverError("energy density needs 1 + w > 0");
  if (std::abs(w) < kSeriesCut) {
    // sum_{k>=2} (m-1)(m-2)...(m-k+2)/k! w^k
    double coef = 0.5, wk = w * w, sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      sum += coef * wk;
      coef *= (m - k + 1.0) / (k + 1.0);
      wk *= w;
      if (std::abs(coef * wk) < 1e-19 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::expm1((m + 1.0) * std::log1p(w)) - (m + 1.0) * w) / (m * (m + 1.0));
}

RadialScheme::RadialScheme(const RadialGrid& grid, const ModelParams& P) : grid_(grid), params_(P) {
  static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
  const int N = grid.count;
  const double h = grid.h();
  const int n = P.n;
  const double a = P.a();
  const double e = 1.0 - 2.0 * a;

  mass_.assign(N + 1, 0.0);
  kp_.assign(N + 1, 0.0);
  km_.assign(N + 1, 0.0);
  rp_.assign(N + 1, 0.0);
  rm_.assign(N + 1, 0.0);

  // Everything at node i is scaled by cosh^{1-2a}(s_i), which cancels in the ratios.
  for (int i = 0; i <= N; ++i) {
    const double si = grid.node(i);
    const double lci = log_cosh(si);
    auto dens = [&](double s) { return std::exp(e * (log_cosh(s) - lci)) * std::pow(std::sinh(s), n - 1); };
    auto gauss = [&](double lo, double hi) {
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double sum = 0.0;
      for (int q = 0; q < 4; ++q) sum += gw[q] * dens(mid + half * gx[q]);
      return half * sum;
    };
    double scaled = 0.0;
    if (i > 0) scaled += gauss(si - 0.5 * h, si);
    if (i < N) scaled += gauss(si, si + 0.5 * h);
    mass_[i] = scaled * std::exp(e * lci);

    auto face = [&](double s, double& k, double& r) {
      const double sc = std::exp(e * (log_cosh(s) - lci));
      const double sh = std::sinh(s);
      k = std::pow(sh, n - 1) * sc / h / scaled;
      r = a * std::pow(sh, n) / std::cosh(s) * sc / scaled;
    };
    if (i < N) face(si + 0.5 * h, kp_[i], rp_[i]);
    if (i > 0) face(si - 0.5 * h, km_[i], rm_[i]);
    if (i == N) {
      double k = 0.0;
      face(si, k, out_);
      out_ *= 2.0;
    }
  }
}

std::vector<double> RadialScheme::rhs(const std::vector<double>& w, OuterBoundary::Kind outer) const {
  const int N = grid_.count;
  if (w.size() != static_cast<std::size_t>(N) + 1) throw ValidationError("rhs: size does not match the grid");
  check_positive(w);
  const double m = params_.m;
  std::vector<double> hv(N + 1), ph(N + 1), out(N + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    hv[i] = h_of_w(w[i], m);
    ph[i] = reaction_of_w(w[i], m);
  }
  const int last = outer == OuterBoundary::Kind::dirichlet ? N - 1 : N;
  for (int i = 0; i <= last; ++i) {
    double r = 0.0;
    if (i < N) r += kp_[i] * (hv[i + 1] - hv[i]) + rp_[i] * (ph[i] + ph[i + 1]);
    if (i > 0) r -= km_[i] * (hv[i] - hv[i - 1]) + rm_[i] * (ph[i - 1] + ph[i]);
    out[i] = r;
  }
  if (outer == OuterBoundary::Kind::outflow) out[N] += out_ * ph[N];
  return out;
}

int RadialScheme::backward_euler(std::vector<double>& w, double dt, OuterBoundary::Kind outer, double outer_value,
                                 const StepOptions& opt) const {
  const int N = grid_.count;
  const double m = params_.m;
  const bool dir = outer == OuterBoundary::Kind::dirichlet;
  const int M = dir ? N : N + 1;
  const std::vector<double> old = w;
  std::vector<double> x = w;
  if (dir) x[N] = outer_value;

  auto residual = [&](const std::vector<double>& y, std::vector<double>& F) {
    const std::vector<double> r = rhs(y, outer);
    double worst = 0.0;
    for (int i = 0; i < M; ++i) {
      F[i] = y[i] - old[i] - dt * r[i];
      worst = std::max(worst, std::abs(F[i]));
    }
    return worst;
  };

  std::vector<double> F(M), lo(M), dg(M), up(M), trial(N + 1);
  double fnorm = residual(x, F);
  if (fnorm == 0.0) {
    w = x;
    return 0;
  }
  for (int it = 1; it <= opt.max_newton; ++it) {
    std::vector<double> hp(N + 1), pp(N + 1);
    for (int i = 0; i <= N; ++i) {
      hp[i] = std::exp((m - 1.0) * std::log1p(x[i]));
      pp[i] = 1.0 - m * hp[i];
    }
    for (int i = 0; i < M; ++i) {
      double d = 0.0;
      lo[i] = up[i] = 0.0;
      if (i < N) {
        d += -kp_[i] * hp[i] + rp_[i] * pp[i];
        up[i] = -dt * (kp_[i] * hp[i + 1] + rp_[i] * pp[i + 1]);
      }
      if (i > 0) {
        d += -km_[i] * hp[i] - rm_[i] * pp[i];
        lo[i] = -dt * (km_[i] * hp[i - 1] - rm_[i] * pp[i - 1]);
      }
      if (i == N && outer == OuterBoundary::Kind::outflow) d += out_ * pp[N];
      dg[i] = 1.0 - dt * d;
    }
    std::vector<double> delta(M);
    for (int i = 0; i < M; ++i) delta[i] = -F[i];
    if (!thomas(lo, dg, up, delta)) return -1;

    double lambda = 1.0;
    double fnew = 0.0;
    std::vector<double> Fn(M);
    bool accepted = false;
    for (int damp = 0; damp < 12; ++damp, lambda *= 0.5) {
      trial = x;
      bool positive = true;
      for (int i = 0; i < M; ++i) {
        trial[i] = x[i] + lambda * delta[i];
        if (!(1.0 + trial[i] > kPositivityFloor)) positive = false;
      }
      if (!positive) continue;
      fnew = residual(trial, Fn);
      if (fnew <= (1.0 - 1e-4 * lambda) * fnorm || fnew <= 1e-3 * opt.newton_tol * dt) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return -1;
    double dmax = 0.0;
    for (int i = 0; i < M; ++i) dmax = std::max(dmax, std::abs(lambda * delta[i]));
    x = trial;
    F = Fn;
    fnorm = fnew;
    if (dmax <= opt.newton_tol || fnorm == 0.0) {
      w = x;
      return it;
    }
  }
  return -1;
}

GridFunction nonlinear_rhs(const GridFunction& w, const ModelParams& params) {
  if (w.ell != 0) throw ValidationError("nonlinear_rhs acts on radial (ell = 0) data");
  const RadialScheme scheme(w.grid, params);
  GridFunction out = w;
  out.values = scheme.rhs(w.values, OuterBoundary::Kind::outflow);
  return out;
}

namespace {

// Advances w by dt with up to max_halvings recursive splittings.
void advance(const RadialScheme& scheme, std::vector<double>& w, double t, double dt, const OuterBoundary& outer,
             const StepOptions& opt, int depth, int& iterations, int& halvings) {
  const double bv = outer.kind == OuterBoundary::Kind::dirichlet ? outer.value(t + dt) : 0.0;
  std::vector<double> trial = w;
  const int it = scheme.backward_euler(trial, dt, outer.kind, bv, opt);
  if (it >= 0) {
    w = trial;
    iterations += it;
    return;
  }
  if (depth >= opt.max_halvings) {
    std::ostringstream os;
    os << "Newton iteration failed at t = " << t << " after " << depth << " time-step halvings (dt = " << dt << ")";
    throw SolverError(os.str());
  }
  ++halvings;
  advance(scheme, w, t, 0.5 * dt, outer, opt, depth + 1, iterations, halvings);
  advance(scheme, w, t + 0.5 * dt, 0.5 * dt, outer, opt, depth + 1, iterations, halvings);
}

}  // namespace

namespace detail {

void step_with(const RadialScheme& scheme, EvolutionState& state, double dt, const StepOptions& opt, int& iterations,
               int& halvings) {
  std::vector<double>& w = state.w.values;
  if (!opt.extrapolate) {
    advance(scheme, w, state.t, dt, state.outer, opt, 0, iterations, halvings);
  } else {
    std::vector<double> full = w, half = w;
    advance(scheme, full, state.t, dt, state.outer, opt, 0, iterations, halvings);
    advance(scheme, half, state.t, 0.5 * dt, state.outer, opt, 0, iterations, halvings);
    advance(scheme, half, state.t + 0.5 * dt, 0.5 * dt, state.outer, opt, 0, iterations, halvings);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * half[i] - full[i];
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!(1.0 + w[i] > kPositivityFloor)) {
        std::ostringstream os;
        os << "extrapolated step left the positivity margin at node " << i << " (v = " << 1.0 + w[i] << ")";
        throw SolverError(os.str());
      }
  }
  state.t += dt;
}

}  // namespace detail

EvolutionState step_nonlinear(const EvolutionState& state, double dt, const StepOptions& opt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (state.w.ell != 0) throw ValidationError("the nonlinear solver is radial (ell = 0)");
  for (std::size_t i = 0; i < state.w.values.size(); ++i)
    if (!(1.0 + state.w.values[i] > kPositivityFloor)) {
      std::ostringstream os;
      os << "initial data violates the positivity margin at node " << i << " (v = " << 1.0 + state.w.values[i]
         << ")";
      throw ValidationError(os.str());
    }
  const RadialScheme scheme(state.w.grid, state.params);
  EvolutionState next = state;
  int it = 0, hv = 0;
  detail::step_with(scheme, next, dt, opt, it, hv);
  return next;
}

}  // namespace fastdiff
