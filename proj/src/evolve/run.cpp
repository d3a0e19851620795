#include <cmath>

#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/kernels.hpp"
#include "step_internal.hpp"

namespace fastdiff {

namespace {

class Recorder {
 public:
  Recorder(EvolutionTrace& trace, const RadialScheme& scheme, const RecordOptions& opt)
      : trace_(trace), opt_(opt) {
    const RadialGrid& g = scheme.grid();
    const ModelParams& P = scheme.params();
    trace_.grid = g;
    trace_.params = P;
    trace_.etas = opt.etas;
    trace_.weighted_norms.assign(opt.etas.size(), {});
    for (double eta : opt.etas) {
      std::vector<double> w(g.size());
      for (int i = 0; i < g.size(); ++i) w[i] = std::pow(std::cosh(g.node(i)), -eta);
      eta_weights_.push_back(std::move(w));
    }
    ones_.assign(g.size(), 1.0);
    mass_ = scheme.cell_mass();
    const double f = detail::mass_factor(P);
    for (double& x : mass_) x *= f;
    cigar_ = trapezoid_weights(g, P.n);
    m_ = P.m;
  }

  void record(const EvolutionState& s) {
    const std::vector<double>& w = s.w.values;
    trace_.times.push_back(s.t);
    trace_.sup_norms.push_back(kernels::weighted_abs_max(w, ones_));
    for (std::size_t k = 0; k < eta_weights_.size(); ++k)
      trace_.weighted_norms[k].push_back(kernels::weighted_abs_max(w, eta_weights_[k]));
    trace_.mass.push_back(kernels::weighted_dot(w, ones_, mass_));
    double e = 0.0;
    if (opt_.energy) {
      std::vector<double> H(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) H[i] = energy_density(w[i], m_);
      e = detail::sphere_area(s.params.n) * kernels::weighted_dot(H, ones_, cigar_);
    }
    trace_.energy.push_back(e);
    double lo = 1e300, hi = -1e300;
    for (double x : w) {
      lo = std::min(lo, 1.0 + x);
      hi = std::max(hi, 1.0 + x);
    }
    trace_.min_v.push_back(lo);
    trace_.max_v.push_back(hi);
    if (opt_.snapshot_every > 0 && count_ % opt_.snapshot_every == 0) trace_.snapshots.push_back({s.t, w});
    ++count_;
  }

 private:
  EvolutionTrace& trace_;
  const RecordOptions& opt_;
  std::vector<std::vector<double>> eta_weights_;
  std::vector<double> ones_, mass_, cigar_;
  double m_ = 0.5;
  int count_ = 0;
};

}  // namespace

EvolutionTrace run(const EvolutionState& state0, double dt, double t_final, const RecordOptions& record,
                   const StepOptions& opt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(t_final >= 0.0)) throw ValidationError("t_final must be >= 0");
  if (record.every < 1) throw ValidationError("record interval must be >= 1");
  if (state0.w.ell != 0) throw ValidationError("the nonlinear solver is radial (ell = 0)");
  for (double x : state0.w.values)
    if (!(1.0 + x > kPositivityFloor)) throw ValidationError("initial data violates the positivity margin");

  const RadialScheme scheme(state0.w.grid, state0.params);
  EvolutionTrace trace;
  Recorder rec(trace, scheme, record);
  EvolutionState s = state0;
  rec.record(s);
  const long steps = std::lround(t_final / dt);
  const double t0 = state0.t;
  for (long k = 1; k <= steps; ++k) {
    detail::step_with(scheme, s, dt, opt, trace.newton_iterations, trace.halvings);
    s.t = t0 + k * dt;
    if (k % record.every == 0 || k == steps) rec.record(s);
  }
  return trace;
}

}  // namespace fastdiff
