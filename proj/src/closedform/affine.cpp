#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

Eigen::VectorXd shape_eigenvalues(const Eigen::MatrixXd& sigma0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma0, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double det_shifted(const Eigen::VectorXd& mu, double sigma) {
  double d = 1.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) d *= mu[i] + sigma;
  return d;
}

double density_at(const Eigen::MatrixXd& sigma0, double sigma, const Eigen::VectorXd& y,
                  const ModelParams& P) {
  const Eigen::Index n = sigma0.rows();
  const Eigen::MatrixXd S = sigma0 + sigma * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw SolverError("affine: Sigma lost positive definiteness");
  const double q = y.dot(llt.solve(y));
  const Eigen::MatrixXd L = llt.matrixL();
  double det = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) det *= L(i, i) * L(i, i);
  return std::pow(P.B + q, -P.a()) / std::sqrt(det);
}

// The diagonal traceless shape used for calibration.
Eigen::MatrixXd calibration_shape(int n) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; i += 2) {
    S(i, i) = 0.25;
    S(i + 1, i + 1) = -0.25;
  }
  return S;
}

// Fourth-order central second difference of rho^m along axis i.
double lap_rho_m(const Eigen::MatrixXd& S0, double sigma, const Eigen::VectorXd& y, double h,
                 const ModelParams& P) {
  auto g = [&](const Eigen::VectorXd& z) { return std::pow(density_at(S0, sigma, z, P), P.m); };
  const double g0 = g(y);
  double lap = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(y.size());
    e[i] = h;
    lap += (-g(y + 2 * e) + 16 * g(y + e) - 30 * g0 + 16 * g(y - e) - g(y - 2 * e)) / (12 * h * h);
  }
  return lap / P.m;
}

double calibrate(const ModelParams& P) {
  const int n = P.n;
  const Eigen::MatrixXd S0 = calibration_shape(n);
  const double sigma = 1.0, h = 1e-2, e = 1e-3;
  double num = 0.0, den = 0.0;
  const int pts = 3;
  const int total = static_cast<int>(std::pow(2 * pts + 1, n));
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd y(n);
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      y[i] = 0.4 * ((rem % (2 * pts + 1)) - pts);
      rem /= 2 * pts + 1;
    }
    auto rho = [&](double sg) { return density_at(S0, sg, y, P); };
    const double drho =
        (-rho(sigma + 2 * e) + 8 * rho(sigma + e) - 8 * rho(sigma - e) + rho(sigma - 2 * e)) / (12 * e);
    const double rhs = lap_rho_m(S0, sigma, y, h, P);
    num += drho * rhs;
    den += drho * drho;
  }
  const double rate = num / den;
  return std::pow(rate, P.n + P.p) / det_shifted(shape_eigenvalues(S0), sigma);
}

}  // namespace

double affine_cB_closed_form(const ModelParams& P) { return std::pow(2.0 * (P.n + P.p), P.n + P.p); }

double affine_cB_calibrated(const ModelParams& P) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, double> cache;
  const auto key = std::make_tuple(P.n, P.m, P.B);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double value = calibrate(P);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, value).first->second;
}

AffineState make_affine_state(const Eigen::MatrixXd& sigma0, double sigma, const ModelParams& P) {
  if (sigma0.rows() != P.n || sigma0.cols() != P.n) throw ValidationError("Sigma0 must be n x n");
  if ((sigma0 - sigma0.transpose()).norm() > 1e-12 * (1.0 + sigma0.norm()))
    throw ValidationError("Sigma0 must be symmetric");
  if (std::abs(sigma0.trace()) > 1e-12 * (1.0 + sigma0.norm()))
    throw ValidationError("Sigma0 must be traceless");
  if (shape_eigenvalues(sigma0).minCoeff() + sigma <= 0.0)
    throw ValidationError("Sigma0 + sigma I must be positive definite");
  return {sigma0, sigma, affine_cB_calibrated(P), 0.0};
}

double affine_sigma_rate(const AffineState& st, const ModelParams& P) {
  const double det = det_shifted(shape_eigenvalues(st.sigma0), st.sigma);
  if (!(det > 0.0)) throw SolverError("affine: Sigma lost positive definiteness");
  return std::pow(st.cB * det, 1.0 / (P.n + P.p));
}

AffineState affine_step(const AffineState& st, double dtau, const ModelParams& P) {
  const Eigen::VectorXd mu = shape_eigenvalues(st.sigma0);
  auto f = [&](double sg) {
    const double det = det_shifted(mu, sg);
    if (!(det > 0.0) || mu.minCoeff() + sg <= 0.0)
      throw SolverError("affine: Sigma lost positive definiteness");
    return std::pow(st.cB * det, 1.0 / (P.n + P.p));
  };
  const double s = st.sigma;
  const double k1 = f(s);
  const double k2 = f(s + 0.5 * dtau * k1);
  const double k3 = f(s + 0.5 * dtau * k2);
  const double k4 = f(s + dtau * k3);
  AffineState out = st;
  out.sigma = s + dtau / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  out.tau = st.tau + dtau;
  if (mu.minCoeff() + out.sigma <= 0.0) throw SolverError("affine: Sigma lost positive definiteness");
  return out;
}

double affine_density(const AffineState& st, const Eigen::VectorXd& y, const ModelParams& P) {
  return density_at(st.sigma0, st.sigma, y, P);
}

AffineResidual affine_pde_residual(const AffineState& st, double dtau, double hy, double extent,
                                   int points, const ModelParams& P) {
  const AffineState fwd = affine_step(st, dtau, P);
  const AffineState bwd = affine_step(st, -dtau, P);
  const int n = P.n;
  const int side = 2 * points + 1;
  const int total = static_cast<int>(std::pow(side, n));
  AffineResidual res{0.0, 0.0};
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd y(n);
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      y[i] = extent * static_cast<double>((rem % side) - points) / std::max(points, 1);
      rem /= side;
    }
    const double rho_t = (affine_density(fwd, y, P) - affine_density(bwd, y, P)) / (2 * dtau);
    auto g = [&](const Eigen::VectorXd& z) { return std::pow(affine_density(st, z, P), P.m); };
    const double g0 = g(y);
    double lap = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = hy;
      lap += (g(y + e) - 2 * g0 + g(y - e)) / (hy * hy);
    }
    res.max_residual = std::max(res.max_residual, std::abs(rho_t - lap / P.m));
    res.scale = std::max(res.scale, std::abs(rho_t));
  }
  return res;
}

}  // namespace fastdiff
