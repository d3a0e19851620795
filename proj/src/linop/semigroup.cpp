#include <cmath>

#include "fastdiff/error.hpp"
#include "fastdiff/kernels.hpp"
#include "fastdiff/linop.hpp"

namespace fastdiff {

CrankNicolson::CrankNicolson(const TridiagonalOperator& op, double dt) : op_(&op), dt_(dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
  const int M = op.unknowns();
  lower_.resize(M);
  cprime_.resize(M);
  denom_.resize(M);
  const double a = 0.5 * dt;
  for (int i = 0; i < M; ++i) {
    lower_[i] = -a * op.sub[i];
    const double d = 1.0 - a * op.diag[i];
    const double den = i == 0 ? d : d - lower_[i] * cprime_[i - 1];
    if (!(std::abs(den) > 1e-300)) throw SolverError("Crank-Nicolson matrix is singular");
    denom_[i] = den;
    cprime_[i] = -a * op.sup[i] / den;
  }
}

void CrankNicolson::step(std::vector<double>& f) const {
  const TridiagonalOperator& op = *op_;
  const int M = op.unknowns();
  const std::size_t first = static_cast<std::size_t>(op.first);
  std::vector<double> rhs(M);
  kernels::tridiag_apply(op.sub, op.diag, op.sup, std::span<const double>(f).subspan(first, M), rhs);
  const double a = 0.5 * dt_;
  for (int i = 0; i < M; ++i) rhs[i] = f[first + i] + a * rhs[i];
  rhs[0] /= denom_[0];
  for (int i = 1; i < M; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / denom_[i];
  for (int i = M - 2; i >= 0; --i) rhs[i] -= cprime_[i] * rhs[i + 1];
  for (int i = 0; i < M; ++i) f[first + i] = rhs[i];
  if (first > 0) f[0] = 0.0;
  f.back() = 0.0;
}

GridFunction step_linear(const TridiagonalOperator& op, const GridFunction& f, double dt) {
  if (f.ell != op.ell || f.values.size() != static_cast<std::size_t>(op.grid.size()))
    throw ValidationError("step_linear: grid function does not match the operator");
  CrankNicolson cn(op, dt);
  GridFunction out = f;
  cn.step(out.values);
  return out;
}

SemigroupResult semigroup_decay(const TridiagonalOperator& op, const GridFunction& f0,
                                const std::vector<ModeIndex>& modes_to_remove, double t_final, double dt,
                                const ModelParams& params, const WindowPolicy& policy) {
  (void)params;
  if (!(t_final > 0.0)) throw ValidationError("t_final must be > 0");
  GridFunction start = f0;
  if (op.first > 0) start.values[0] = 0.0;
  start.values.back() = 0.0;
  SemigroupResult res;
  res.initial = modes_to_remove.empty() ? start : project_discrete(op, start, modes_to_remove).p_part;
  CrankNicolson cn(op, dt);
  std::vector<double> f = res.initial.values;
  const int steps = static_cast<int>(std::ceil(t_final / dt - 1e-9));
  const std::vector<double> ones(f.size(), 1.0);
  res.times.push_back(0.0);
  res.norms.push_back(kernels::weighted_abs_max(f, ones));
  for (int s = 1; s <= steps; ++s) {
    cn.step(f);
    res.times.push_back(s * dt);
    res.norms.push_back(kernels::weighted_abs_max(f, ones));
  }
  res.fit = fit_rate(res.times, res.norms, policy);
  return res;
}

}  // namespace fastdiff
