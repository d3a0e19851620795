#pragma once
// Post-processing of nonlinear traces: eigen-coefficients, time-shift
// modding, expansion residuals and weighted rate tables.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastdiff/closedform.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/ratefit.hpp"

namespace fastdiff {

struct CoefficientRecord {
  ModeIndex mode;
  std::vector<std::pair<double, double>> estimates;  // (t, c(t))
  double limit = 0.0;
  bool converged = false;
  double tail_bound = 0.0;  // pairing mass beyond s_max, relative to the value
  bool tail_flagged = false;
};

// Tail oscillation tolerance for a converged coefficient.
inline constexpr double kCoefficientTolerance = 1e-2;
// Snapshots whose sup |w| falls below this are ignored as noise.
inline constexpr double kNoiseFloor = 1e-10;

// c(t) = e^{-lambda t} <u - u_B, psi> / ||psi u_B^{1-m/2}||^2 for a radial mode
// at one time; w is the relative perturbation on grid.
double coefficient_at(const RadialGrid& grid, const std::vector<double>& w, double t, const ModeIndex& mode,
                      const ModelParams& params, double* tail = nullptr);
CoefficientRecord extract_coefficient(const EvolutionTrace& trace, const ModeIndex& mode, const ModelParams& params);

// Relative error of 1 + w against the delayed Barenblatt of the same mass.
std::vector<double> shifted_error(const RadialGrid& grid, const std::vector<double>& w, double t, double tau0,
                                  const ModelParams& params);

struct TimeShiftResult {
  double tau0 = 0.0;
  double c_slope = 0.0;  // d c_01 / d tau0
  double eval_time = 0.0;
  double Lambda = 0.0;
  double eta = 0.0;  // weight exponent eta(Lambda)
  std::vector<double> times, norms;
  RateFit shifted_rate;
  double lambda01 = 0.0;
  double gamma_measured() const { return shifted_rate.slope / lambda01; }
};

TimeShiftResult mod_time_shift(const EvolutionTrace& trace, const ModelParams& params,
                               std::optional<double> Lambda = std::nullopt, const WindowPolicy& policy = {});

struct ExpansionResult {
  RateFit fit;
  std::vector<double> times, norms;
  double Lambda = 0.0;
  bool superquadratic = false;
  std::optional<RateFit> hypothesis;  // fitted rate of the amplification norm
};

// Rate of the amplification-hypothesis norm sup |w| / (B+|x|^2)^{eta(Lambda)}.
RateFit amplification_rate(const EvolutionTrace& trace, double Lambda, const ModelParams& params,
                           const WindowPolicy& policy = {});

// lambda_hyp is the rate the amplification hypothesis must show when Lambda
// lies below 2 lambda_01; it is checked on the data before the fit.
ExpansionResult expansion_residual(const EvolutionTrace& trace, double Lambda,
                                   const std::vector<CoefficientRecord>& coefficients, const ModelParams& params,
                                   const WindowPolicy& policy = {}, std::optional<double> lambda_hyp = std::nullopt);

struct WeightedRateRow {
  double eta = 0.0;
  double slope = 0.0;
  double threshold = 0.0;  // essential_threshold(0, eta)
  double predicted = 0.0;  // max(threshold, lambda_01)
  bool fitted = false;
  std::string note;
};
std::vector<WeightedRateRow> weighted_rate_report(const EvolutionTrace& trace, const ModelParams& params,
                                                  const WindowPolicy& policy = {});

}  // namespace fastdiff
