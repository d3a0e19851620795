#pragma once
// Cigar geometry, the geodesic radial grid, and the norms used to state rates.

#include <functional>
#include <vector>

#include "fastdiff/closedform.hpp"

namespace fastdiff {

double s_of_r(double r);
double r_of_s(double s);
double volume_weight(double s, int n);  // tanh^{n-1}(s)

struct RadialGrid {
  double s_max = 12.0;
  int count = 1200;

  double h() const { return s_max / count; }
  double node(int i) const { return i * h(); }
  int size() const { return count + 1; }
};

RadialGrid make_grid(double s_max, int count);
RadialGrid refine(const RadialGrid& grid);

struct GridFunction {
  RadialGrid grid;
  int ell = 0;
  std::vector<double> values;
};

GridFunction zero_function(const RadialGrid& grid, int ell);
GridFunction sample(const RadialGrid& grid, int ell, const std::function<double(double)>& f);
// Sample (cosh s)^{-eta} v_{lk}(s).
GridFunction sample_eigenfunction(const RadialGrid& grid, const ModeIndex& mode, double eta,
                                  const ModelParams& params);
// Throws unless the type invariants (finite values, f(0)=0 for ell >= 1) hold.
void validate(const GridFunction& f);

struct NormSpec {
  enum class Kind { weighted_sup, weighted_holder, l2_cigar, l2_uBm };
  Kind kind = Kind::weighted_sup;
  double eta = 0.0;
  double alpha = 0.5;
};

// Trapezoidal weights h*tanh^{n-1}(s_i), halved at both ends.
std::vector<double> trapezoid_weights(const RadialGrid& grid, int n);

double integrate_cigar(const GridFunction& f, int n);
double inner_product_uBm(const GridFunction& f, const GridFunction& g, const ModelParams& params);

struct QuadratureResult {
  double value;
  double tail;  // estimate of the integral beyond s_max
};
// Trapezoid integral of f tanh^{n-1} with a tail estimate assuming the
// integrand decays like exp(-kappa s) beyond s_max (kappa fitted on the last
// two nodes; infinite tail reported when it does not decay).
QuadratureResult integrate_cigar_with_tail(const GridFunction& f, int n);

double weighted_sup(const GridFunction& f, double eta);
double holder_seminorm(const GridFunction& f, const NormSpec& spec);
double norm(const GridFunction& f, const NormSpec& spec, const ModelParams& params);

}  // namespace fastdiff
