#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastdiff/asymptotics.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/kernels.hpp"

namespace fastdiff {

RateFit amplification_rate(const EvolutionTrace& trace, double Lambda, const ModelParams& P,
                           const WindowPolicy& policy) {
  if (trace.snapshots.empty()) throw ValidationError("amplification check needs snapshots");
  // (B + |x|^2)^{-e} with e = p/2 - 1 - sqrt((p/2+1)^2 + Lambda) = eta(Lambda).
  const double e = eta_for_target_rate(Lambda, P);
  std::vector<double> weight(trace.grid.size());
  for (int i = 0; i < trace.grid.size(); ++i) {
    const double c = std::cosh(trace.grid.node(i));
    weight[i] = std::pow(P.B * c * c, -e);
  }
  std::vector<double> t, v;
  for (const Snapshot& snap : trace.snapshots) {
    t.push_back(snap.t);
    v.push_back(kernels::weighted_abs_max(snap.w, weight));
  }
  return fit_rate(t, v, policy);
}

ExpansionResult expansion_residual(const EvolutionTrace& trace, double Lambda,
                                   const std::vector<CoefficientRecord>& coefficients, const ModelParams& P,
                                   const WindowPolicy& policy, std::optional<double> lambda_hyp) {
  if (trace.snapshots.empty()) throw ValidationError("expansion residual needs snapshots");
  if (!(P.p > 2.0)) throw ValidationError("expansion residual needs p > 2");
  const double l01 = eigenvalue({0, 1, 0}, P);
  const double lcont = continuum_onset(P);
  if (!(Lambda >= lcont - 1e-12 && Lambda <= l01 + 1e-12)) {
    std::ostringstream os;
    os << "Lambda = " << Lambda << " outside [" << lcont << ", " << l01 << "]";
    throw ValidationError(os.str());
  }
  ExpansionResult res;
  res.Lambda = Lambda;
  if (!(Lambda > 2.0 * l01)) {
    // Beyond the quadratic barrier: require lambda + lambda_01 < Lambda and
    // the amplification norm decaying at rate lambda on the data.
    if (!lambda_hyp || !(*lambda_hyp + l01 < Lambda)) {
      std::ostringstream os;
      os << "Lambda = " << Lambda << " <= 2 lambda_01 = " << 2.0 * l01
         << " needs a hypothesis rate lambda with lambda + lambda_01 < Lambda";
      throw ValidationError(os.str());
    }
    res.hypothesis = amplification_rate(trace, Lambda, P, policy);
    if (!(res.hypothesis->slope <= *lambda_hyp + 0.05 * std::abs(*lambda_hyp))) {
      std::ostringstream os;
      os << "amplification hypothesis fails on the data: measured rate " << res.hypothesis->slope << " > "
         << *lambda_hyp;
      throw ValidationError(os.str());
    }
    res.superquadratic = true;
  }

  const double e = (P.p + 2.0 - std::sqrt((P.p + 2.0) * (P.p + 2.0) + 4.0 * Lambda)) / 4.0;
  const int N1 = trace.grid.size();
  std::vector<double> bx(N1), weight(N1), r(N1);
  for (int i = 0; i < N1; ++i) {
    const double s = trace.grid.node(i);
    const double c = std::cosh(s);
    bx[i] = P.B * c * c;
    weight[i] = std::pow(bx[i], -e);
    r[i] = std::sqrt(P.B) * std::sinh(s);
  }
  struct Term {
    double lambda;
    std::vector<double> u;
  };
  std::vector<Term> terms;
  for (const CoefficientRecord& rec : coefficients) {
    const double lam = eigenvalue(rec.mode, P);
    if (!(lam > Lambda && lam < 0.0)) continue;
    if (rec.mode.ell != 0) throw ValidationError("radial traces carry only ell = 0 coefficients");
    const PsiPolynomial poly = psi_polynomial(rec.mode, P);
    Term term{lam, std::vector<double>(N1)};
    for (int i = 0; i < N1; ++i) term.u[i] = rec.limit * eval_psi(poly, r[i], P);
    terms.push_back(std::move(term));
  }
  std::vector<double> R(N1);
  for (const Snapshot& snap : trace.snapshots) {
    for (int i = 0; i < N1; ++i) R[i] = bx[i] * snap.w[i];
    for (const Term& term : terms) {
      const double f = std::exp(term.lambda * snap.t);
      for (int i = 0; i < N1; ++i) R[i] -= term.u[i] * f;
    }
    res.times.push_back(snap.t);
    res.norms.push_back(kernels::weighted_abs_max(R, weight));
  }
  res.fit = fit_rate(res.times, res.norms, policy);
  return res;
}

std::vector<WeightedRateRow> weighted_rate_report(const EvolutionTrace& trace, const ModelParams& P,
                                                  const WindowPolicy& policy) {
  std::vector<WeightedRateRow> rows;
  const double l01 = eigenvalue({0, 1, 0}, P);
  for (std::size_t k = 0; k < trace.etas.size(); ++k) {
    WeightedRateRow row;
    row.eta = trace.etas[k];
    row.threshold = essential_threshold(0, row.eta, P);
    row.predicted = is_admissible({0, 1, 0}, row.eta, P) ? std::max(row.threshold, l01) : row.threshold;
    try {
      const RateFit f = fit_rate(trace.times, trace.weighted_norms[k], policy);
      row.slope = f.slope;
      row.fitted = true;
    } catch (const ValidationError& e) {
      row.note = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fastdiff
