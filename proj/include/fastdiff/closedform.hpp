#pragma once
// Closed-form layer: model parameters, Barenblatt profiles, the self-similar
// change of variables, eigenvalues and eigenfunctions of the linearization,
// spectral thresholds, rate tables and the affine family.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fastdiff {

struct ModelParams {
  int n = 3;
  double m = 2.0 / 3.0;
  double B = 1.0;
  double p = 3.0;       // 2/(1-m) - n
  double beta = 1.0;    // (1 + n/p)/2
  double eta_cr = 0.5;  // p/2 - 1

  // Exponent of u_B = (B + r^2)^{-a}; equals (n+p)/2.
  double a() const { return 1.0 / (1.0 - m); }
  // Half-width q = p/2 + 1 of the continuous spectrum at eta_cr.
  double q() const { return 0.5 * p + 1.0; }
};

ModelParams derive_params(int n, double m, double B = 1.0);

// m_q = 1 - 2/(n+q).
double landmark(int n, double q);

struct Landmarks {
  double m0, m1, m2, m6, mn, mn4;
  std::optional<double> m_pstar;  // n = 1 only
};
Landmarks landmarks(const ModelParams& params);

double barenblatt_u(double x_norm, const ModelParams& params);
double barenblatt_rho(double tau, double y_norm, const ModelParams& params);

struct SelfSimilarPoint {
  double t;
  std::vector<double> x;
};
struct PhysicalPoint {
  double tau;
  std::vector<double> y;
};
SelfSimilarPoint to_selfsimilar(double tau, const std::vector<double>& y,
                                const ModelParams& params);
PhysicalPoint from_selfsimilar(double t, const std::vector<double>& x,
                               const ModelParams& params);
double tau_of_t(double t, const ModelParams& params);
double t_of_tau(double tau, const ModelParams& params);

// ---------------------------------------------------------------- spectrum

struct ModeIndex {
  int ell = 0;
  int k = 0;
  int mu = 0;
  bool operator==(const ModeIndex& o) const { return ell == o.ell && k == o.k; }
};

struct SpectralDatum {
  enum class Kind { eigenvalue, continuum_threshold };
  Kind kind = Kind::eigenvalue;
  double lambda = 0.0;
  std::optional<ModeIndex> mode;
  double eta = 0.0;
};

double eigenvalue(const ModeIndex& mode, const ModelParams& params);
double essential_threshold(int ell, double eta, const ModelParams& params);
double continuum_onset(const ModelParams& params);  // -(p/2+1)^2
bool is_admissible(const ModeIndex& mode, double eta, const ModelParams& params);
std::vector<SpectralDatum> admissible_modes(double eta, const ModelParams& params);

struct PotentialProfile {
  double c_inf;
  double b_inf;
  double depth;
};
PotentialProfile potential_profile(double eta, const ModelParams& params);

double eta_for_target_rate(double Lambda, const ModelParams& params);
// max{lambda_0^cont, lambda_02, lambda_20} over the modes that exist at eta_cr.
double default_target_rate(const ModelParams& params);

enum class RateBranch { subcritical, first, middle, third };
std::string to_string(RateBranch b);

struct SecondOrderRates {
  double gamma;
  double delta;
  RateBranch branch;
  // Set when m sits on the boundary between two branches.
  std::optional<double> gamma_other;
  std::optional<double> delta_other;
  std::optional<RateBranch> branch_other;
};
SecondOrderRates second_order_rates(const ModelParams& params);

// ----------------------------------------------------------- eigenfunctions

// Coefficients of psi_{lk}(r) = r^ell * sum_j c_j (r^2/B)^j.
struct PsiPolynomial {
  int ell = 0;
  std::vector<double> coeffs;
  bool exact_rational = false;
};
PsiPolynomial psi_polynomial(const ModeIndex& mode, const ModelParams& params);
double eval_psi(const PsiPolynomial& poly, double r, const ModelParams& params);

double eigenfunction_psi(const ModeIndex& mode, double r, const ModelParams& params);
double eigenfunction_v(const ModeIndex& mode, double s, const ModelParams& params);

// --------------------------------------------------------- delayed Barenblatt

// Relative density v(t,s) of the Barenblatt with parameter Bplus delayed by
// tau0 in the original time, seen in self-similar variables.
double delayed_barenblatt_v(double t, double s, double tau0, double Bplus,
                            const ModelParams& params);
// Same quantity minus one, computed without cancellation.
double delayed_barenblatt_w(double t, double s, double tau0, double Bplus,
                            const ModelParams& params);

// ------------------------------------------------------------------- affine

struct AffineState {
  Eigen::MatrixXd sigma0;  // traceless symmetric
  double sigma = 1.0;
  double cB = 0.0;
  double tau = 0.0;
};

double affine_cB_closed_form(const ModelParams& params);
// Numerical calibration from the PDE residual at tau = 0; cached per params.
double affine_cB_calibrated(const ModelParams& params);
AffineState make_affine_state(const Eigen::MatrixXd& sigma0, double sigma,
                              const ModelParams& params);
double affine_sigma_rate(const AffineState& state, const ModelParams& params);
AffineState affine_step(const AffineState& state, double dtau, const ModelParams& params);
double affine_density(const AffineState& state, const Eigen::VectorXd& y,
                      const ModelParams& params);

struct AffineResidual {
  double max_residual;  // max |rho_tau - (1/m) Lap rho^m|
  double scale;         // max |rho_tau| over the same points
  double scaled() const { return max_residual / scale; }
};
// Finite-difference residual of the porous-medium equation for the affine
// density at the state's time, on a (2*points+1)^n box of half-width extent.
AffineResidual affine_pde_residual(const AffineState& state, double dtau,
                                   double hy, double extent, int points,
                                   const ModelParams& params);

}  // namespace fastdiff
