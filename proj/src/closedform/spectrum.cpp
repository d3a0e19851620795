#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {
constexpr double kAdmissibleTol = 1e-10;
constexpr double kBranchTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kBranchTol * std::max(1.0, std::abs(b)); }
}  // namespace

double eigenvalue(const ModeIndex& md, const ModelParams& P) {
  const double l = md.ell, k = md.k;
  return -((l + 2.0 * k) * P.p + P.n * l + 4.0 * k * (1.0 - l - k));
}

double continuum_onset(const ModelParams& P) { return -P.q() * P.q(); }

double essential_threshold(int ell, double eta, const ModelParams& P) {
  const double d = eta - P.eta_cr;
  return d * d - P.q() * P.q() - ell * (ell + P.n - 2.0);
}

bool is_admissible(const ModeIndex& md, double eta, const ModelParams& P) {
  if (md.ell < 0 || md.k < 0) return false;
  if (P.n == 1 && md.ell > 1) return false;
  const double room = P.q() - std::abs(eta - P.eta_cr);
  return md.ell + 2.0 * md.k < room - kAdmissibleTol;
}

std::vector<SpectralDatum> admissible_modes(double eta, const ModelParams& P) {
  std::vector<SpectralDatum> out;
  const int ell_max = P.n == 1 ? 1 : static_cast<int>(std::ceil(P.q())) + 1;
  for (int ell = 0; ell <= ell_max; ++ell) {
    for (int k = 0;; ++k) {
      ModeIndex md{ell, k, 0};
      if (!is_admissible(md, eta, P)) break;
      out.push_back({SpectralDatum::Kind::eigenvalue, eigenvalue(md, P), md, eta});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SpectralDatum& a, const SpectralDatum& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.mode->ell != b.mode->ell) return a.mode->ell < b.mode->ell;
    return a.mode->k < b.mode->k;
  });
  return out;
}

PotentialProfile potential_profile(double eta, const ModelParams& P) {
  return {-(P.p - eta) * (2.0 + eta), -(P.p - 2.0 * eta - 2.0), (P.p + P.n - eta) * (2.0 + eta)};
}

double eta_for_target_rate(double Lambda, const ModelParams& P) {
  const double onset = continuum_onset(P);
  if (!(Lambda >= onset - 1e-12 * std::abs(onset)) || !(Lambda < 0.0)) {
    std::ostringstream os;
    os << "target rate " << Lambda << " outside [" << onset << ", 0[";
    throw ValidationError(os.str());
  }
  return P.eta_cr - std::sqrt(std::max(0.0, Lambda - onset));
}

std::string to_string(RateBranch b) {
  switch (b) {
    case RateBranch::subcritical: return "subcritical";
    case RateBranch::first: return "first";
    case RateBranch::middle: return "middle";
    case RateBranch::third: return "third";
  }
  return "unknown";
}

namespace {

struct Pair {
  double gamma, delta;
};

Pair branch_values(RateBranch b, const ModelParams& P) {
  const double p = P.p, n = P.n;
  switch (b) {
    case RateBranch::subcritical:
      return {P.q() * P.q() / (2.0 * p), (0.5 * p - 1.0) / (p + n)};
    case RateBranch::first:
      return {(p + 2.0) * (p + 2.0) / (8.0 * p), (0.5 * p - 1.0) / (n + p)};
    case RateBranch::middle:
      return {2.0 * (p - 2.0) / p, 2.0 / (n + p)};
    case RateBranch::third: {
      const double e = 0.5 * p - 1.0;
      return {(n + p) / p, (e - std::sqrt(std::max(0.0, e * e - 2.0 * n))) / (n + p)};
    }
  }
  return {0, 0};
}

SecondOrderRates single(RateBranch b, const ModelParams& P) {
  const Pair v = branch_values(b, P);
  return {v.gamma, v.delta, b, std::nullopt, std::nullopt, std::nullopt};
}

SecondOrderRates boundary(RateBranch lo, RateBranch hi, const ModelParams& P) {
  SecondOrderRates r = single(lo, P);
  const Pair v = branch_values(hi, P);
  r.gamma_other = v.gamma;
  r.delta_other = v.delta;
  r.branch_other = hi;
  return r;
}

}  // namespace

SecondOrderRates second_order_rates(const ModelParams& P) {
  const double p = P.p;
  if (near(p, 2.0)) {
    const Pair lo = branch_values(RateBranch::subcritical, P);
    const Pair hi = branch_values(RateBranch::first, P);
    std::ostringstream os;
    os << "m = m_2 is a branch boundary; one-sided limits: m < m_2 gives (gamma, delta) = (" << lo.gamma
       << ", " << lo.delta << "), m > m_2 gives (" << hi.gamma << ", " << hi.delta << ")";
    throw ValidationError(os.str());
  }
  if (p < 2.0) return single(RateBranch::subcritical, P);
  if (P.n == 1) {
    const double pstar = 2.0 * (std::sqrt(2.0) + 1.0);
    if (near(p, pstar)) return boundary(RateBranch::first, RateBranch::third, P);
    return single(p < pstar ? RateBranch::first : RateBranch::third, P);
  }
  const double upper = P.n + 4.0;
  if (near(p, 6.0)) {
    return boundary(RateBranch::first, near(upper, 6.0) ? RateBranch::third : RateBranch::middle, P);
  }
  if (p < 6.0) return single(RateBranch::first, P);
  if (near(p, upper)) return boundary(RateBranch::middle, RateBranch::third, P);
  return single(p < upper ? RateBranch::middle : RateBranch::third, P);
}

double default_target_rate(const ModelParams& P) {
  if (near(P.p, 2.0)) return continuum_onset(P);
  return -2.0 * P.p * second_order_rates(P).gamma;
}

}  // namespace fastdiff
