#include <cmath>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

// log of v(t,s) for the delayed Barenblatt; accurate when v is close to 1.
double log_delayed_ratio(double t, double s, double tau0, double Bplus, const ModelParams& P) {
  if (!(Bplus > 0.0)) throw ValidationError("delayed Barenblatt needs Bplus > 0");
  const double T = std::exp(2.0 * P.p * t);
  const double shift = 2.0 * P.p * tau0 / T;
  if (!(shift > -1.0)) throw ValidationError("delayed Barenblatt: 1 + 2p(tau + tau0) must stay positive");
  const double logR = -std::log1p(shift);
  const double sh = std::sinh(s);
  const double x2 = P.B * sh * sh;
  const double rel = (Bplus - P.B + std::expm1(2.0 * P.beta * logR) * x2) / (P.B + x2);
  return P.n * P.beta * logR - P.a() * std::log1p(rel);
}

}  // namespace

double delayed_barenblatt_v(double t, double s, double tau0, double Bplus, const ModelParams& P) {
  return std::exp(log_delayed_ratio(t, s, tau0, Bplus, P));
}

double delayed_barenblatt_w(double t, double s, double tau0, double Bplus, const ModelParams& P) {
  return std::expm1(log_delayed_ratio(t, s, tau0, Bplus, P));
}

}  // namespace fastdiff
