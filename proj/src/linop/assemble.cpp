#include <cmath>
#include <sstream>

#include "fastdiff/error.hpp"
#include "fastdiff/kernels.hpp"
#include "fastdiff/linop.hpp"

namespace fastdiff {

namespace {

// Weight of the regularized problem: tanh^{n-1}(s) sinh^{2l}(s).
double reg_weight(double s, int n, int ell) {
  return std::pow(std::tanh(s), n - 1) * std::pow(std::sinh(s), 2 * ell);
}

double gauss4(double a, double b, int n, int ell) {
  static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
  static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                  0.3478548451374538};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += w[i] * reg_weight(mid + half * x[i], n, ell);
  return half * sum;
}

void require_match(const TridiagonalOperator& op, const GridFunction& f) {
  if (f.grid.count != op.grid.count || f.grid.s_max != op.grid.s_max)
    throw ValidationError("grid function and operator use different grids");
  if (f.ell != op.ell) throw ValidationError("grid function and operator use different harmonics");
  if (f.values.size() != static_cast<std::size_t>(op.grid.size()))
    throw ValidationError("grid function size does not match the grid");
}

}  // namespace

TridiagonalOperator assemble(int ell, double eta, const RadialGrid& grid, const ModelParams& P) {
  if (ell < 0) throw ValidationError("ell must be >= 0");
  if (P.n == 1 && ell >= 2) throw ValidationError("n = 1 admits only ell in {0, 1}");
  const int N = grid.count;
  const double h = grid.h();
  const int n = P.n;
  const PotentialProfile prof = potential_profile(eta, P);
  const double drift = 2.0 * (eta - P.eta_cr);

  TridiagonalOperator op;
  op.grid = grid;
  op.ell = ell;
  op.eta = eta;
  op.params = P;
  op.first = ell == 0 ? 0 : 1;
  op.bc0 = ell == 0 ? Boundary::neumann_ghost : Boundary::dirichlet;
  op.bcN = Boundary::dirichlet;

  std::vector<double> phi(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) phi[i] = std::pow(std::sinh(grid.node(i)), ell);

  // u'' + c1 u' + c0 u for u = f / sinh^l; c1 = W'/W + b with W = tanh^{n-1} sinh^{2l}.
  auto c0 = [&](double s) {
    const double sech = 1.0 / std::cosh(s);
    return prof.c_inf + prof.depth * sech * sech + ell * (2.0 - n) + ell * drift;
  };
  auto c1 = [&](double s) {
    return (n - 1.0) / (std::sinh(s) * std::cosh(s)) + 2.0 * ell / std::tanh(s) + drift * std::tanh(s);
  };

  // Plain central differences keep positive off-diagonal products only while
  // the singular drift stays below 2/h at the first node; otherwise use the
  // flux form with exact cell volumes.
  const bool central = ell == 0 && n <= 3;
  std::vector<double> vol, half;
  if (!central) {
    vol.resize(static_cast<std::size_t>(N) + 1);
    half.resize(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
      const double s = grid.node(i);
      half[i] = reg_weight(s + 0.5 * h, n, ell);
      const double lo = std::max(0.0, s - 0.5 * h), hi = std::min(grid.s_max, s + 0.5 * h);
      vol[i] = (lo < s ? gauss4(lo, s, n, ell) : 0.0) + (s < hi ? gauss4(s, hi, n, ell) : 0.0);
    }
  }

  const int M = N - op.first;
  op.sub.assign(M, 0.0);
  op.diag.assign(M, 0.0);
  op.sup.assign(M, 0.0);
  const double h2 = h * h;
  for (int i = op.first; i < N; ++i) {
    const double s = grid.node(i);
    double lo = 0.0, up = 0.0, dg = 0.0;
    if (central) {
      if (i == 0) {
        up = 2.0 * n / h2;  // even extension: u'' + c1 u' -> n u''(0)
        dg = -up + c0(0.0);
      } else {
        lo = 1.0 / h2 - c1(s) / (2.0 * h);
        up = 1.0 / h2 + c1(s) / (2.0 * h);
        dg = -2.0 / h2 + c0(s);
      }
    } else {
      const double b = drift * std::tanh(s);
      const double Wm = i > 0 ? half[i - 1] : 0.0, Wp = half[i];
      lo = Wm / (vol[i] * h) - b / (2.0 * h);
      up = Wp / (vol[i] * h) + b / (2.0 * h);
      dg = -(Wm + Wp) / (vol[i] * h) + c0(s);
    }
    if (ell >= 1 && i == 1) {
      // u_0 eliminated by the even extrapolation u_0 = (4u_1 - u_2)/3.
      dg += 4.0 * lo / 3.0;
      up -= lo / 3.0;
      lo = 0.0;
    }
    const int r = i - op.first;
    op.diag[r] = dg;
    if (i > op.first) op.sub[r] = lo * phi[i] / phi[i - 1];
    if (i + 1 < N) op.sup[r] = up * phi[i] / phi[i + 1];
    else op.coupling_end = up * phi[i] / phi[i + 1];
  }

  // Diagonal weights in which the matrix is symmetric, scaled to the cigar
  // cell volume h tanh^{n-1} at the last unknown.
  op.weights.assign(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> logw(static_cast<std::size_t>(N) + 1, 0.0);
  bool sym = true;
  for (int i = op.first; i + 1 < N; ++i) {
    const int r = i - op.first;
    if (!(op.sup[r] * op.sub[r + 1] > 0.0)) {
      sym = false;
      break;
    }
    logw[i + 1] = logw[i] + std::log(op.sup[r] / op.sub[r + 1]);
  }
  if (sym) {
    const double sN = grid.node(N - 1);
    const double ref = std::log(h * volume_weight(sN, n)) - logw[N - 1];
    for (int i = op.first; i < N; ++i) op.weights[i] = std::exp(logw[i] + ref);
  }

  op.zeroth.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    const double s = grid.node(i);
    const double sech = 1.0 / std::cosh(s);
    if (ell == 0 || i > 0) {
      const double th = std::tanh(s);
      op.zeroth[i] = prof.c_inf + prof.depth * sech * sech - (ell > 0 ? ell * (ell + n - 2.0) / (th * th) : 0.0);
    }
  }
  return op;
}

GridFunction apply(const TridiagonalOperator& op, const GridFunction& f) {
  require_match(op, f);
  GridFunction out = zero_function(op.grid, op.ell);
  const std::size_t first = static_cast<std::size_t>(op.first), M = op.diag.size();
  kernels::tridiag_apply(op.sub, op.diag, op.sup, std::span<const double>(f.values).subspan(first, M),
                         std::span<double>(out.values).subspan(first, M));
  return out;
}

GridFunction apply_with_boundary(const TridiagonalOperator& op, const GridFunction& f) {
  GridFunction out = apply(op, f);
  out.values[static_cast<std::size_t>(op.grid.count) - 1] += op.coupling_end * f.values.back();
  return out;
}

double operator_inner(const TridiagonalOperator& op, const GridFunction& f, const GridFunction& g) {
  require_match(op, f);
  require_match(op, g);
  return kernels::weighted_dot(f.values, g.values, op.weights);
}

double eigen_residual(const ModeIndex& mode, double eta, const RadialGrid& grid, const ModelParams& P) {
  if (!is_admissible(mode, eta, P)) {
    std::ostringstream os;
    os << "mode (" << mode.ell << "," << mode.k << ") is not admissible at eta = " << eta;
    throw ValidationError(os.str());
  }
  const TridiagonalOperator op = assemble(mode.ell, eta, grid, P);
  const GridFunction w = sample_eigenfunction(grid, mode, eta, P);
  GridFunction r = apply_with_boundary(op, w);
  const double lambda = eigenvalue(mode, P);
  double worst = 0.0;
  for (int i = op.first; i < grid.count; ++i)
    worst = std::max(worst, std::abs(r.values[i] - lambda * w.values[i]));
  return worst;
}

Projection project(const GridFunction& f, const std::vector<ModeIndex>& modes, const ModelParams& P,
                   double eta) {
  validate(f);
  GridFunction plain = f;
  std::vector<double> up(f.values.size()), down(f.values.size());
  for (int i = 0; i < f.grid.size(); ++i) {
    const double c = std::cosh(f.grid.node(i));
    up[i] = std::pow(c, eta);
    down[i] = 1.0 / up[i];
    plain.values[i] *= up[i];
  }
  GridFunction q = zero_function(f.grid, f.ell);
  for (const ModeIndex& md : modes) {
    if (md.ell != f.ell) throw ValidationError("projection mode does not ride on the profile's harmonic");
    const GridFunction v = sample_eigenfunction(f.grid, md, 0.0, P);
    const double c = inner_product_uBm(plain, v, P) / inner_product_uBm(v, v, P);
    for (std::size_t i = 0; i < q.values.size(); ++i) q.values[i] += c * v.values[i] * down[i];
  }
  Projection out{q, f};
  for (std::size_t i = 0; i < q.values.size(); ++i) out.p_part.values[i] -= q.values[i];
  return out;
}

}  // namespace fastdiff
