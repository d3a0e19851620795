#include <cmath>
#include <sstream>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

namespace fastdiff {

ModelParams derive_params(int n, double m, double B) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(B > 0.0) || !std::isfinite(B)) throw ValidationError("B must be > 0");
  const double m0 = (n - 2.0) / n;
  if (!(m > m0 && m < 1.0)) {
    std::ostringstream os;
    os << "m outside ]m_0,1[ (m_0 = " << m0 << ", m = " << m << ")";
    throw ValidationError(os.str());
  }
  ModelParams P;
  P.n = n;
  P.m = m;
  P.B = B;
  P.p = 2.0 / (1.0 - m) - n;
  P.beta = 0.5 * (1.0 + n / P.p);
  P.eta_cr = 0.5 * P.p - 1.0;
  return P;
}

double landmark(int n, double q) { return 1.0 - 2.0 / (n + q); }

Landmarks landmarks(const ModelParams& P) {
  Landmarks L{landmark(P.n, 0), landmark(P.n, 1), landmark(P.n, 2),
              landmark(P.n, 6), landmark(P.n, P.n), landmark(P.n, P.n + 4),
              std::nullopt};
  if (P.n == 1) L.m_pstar = landmark(1, 2.0 * (std::sqrt(2.0) + 1.0));
  return L;
}

double barenblatt_u(double x, const ModelParams& P) {
  return std::pow(P.B + x * x, -P.a());
}

double barenblatt_rho(double tau, double y, const ModelParams& P) {
  const double T = 1.0 + 2.0 * P.p * tau;
  if (!(T > 0.0)) throw ValidationError("barenblatt_rho requires tau > -1/(2p)");
  return std::pow(T, -P.n * P.beta) * barenblatt_u(std::pow(T, -P.beta) * y, P);
}

double t_of_tau(double tau, const ModelParams& P) {
  const double z = 2.0 * P.p * tau;
  if (!(z > -1.0)) throw ValidationError("self-similar transform requires tau > -1/(2p)");
  return std::log1p(z) / (2.0 * P.p);
}

double tau_of_t(double t, const ModelParams& P) { return std::expm1(2.0 * P.p * t) / (2.0 * P.p); }

SelfSimilarPoint to_selfsimilar(double tau, const std::vector<double>& y, const ModelParams& P) {
  SelfSimilarPoint out{t_of_tau(tau, P), y};
  const double scale = std::exp(-P.beta * 2.0 * P.p * out.t);
  for (double& xi : out.x) xi *= scale;
  return out;
}

PhysicalPoint from_selfsimilar(double t, const std::vector<double>& x, const ModelParams& P) {
  PhysicalPoint out{tau_of_t(t, P), x};
  const double scale = std::exp(P.beta * 2.0 * P.p * t);
  for (double& yi : out.y) yi *= scale;
  return out;
}

}  // namespace fastdiff
