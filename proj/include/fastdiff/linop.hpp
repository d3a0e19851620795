#pragma once
// Central-difference discretization of the conjugated linearized operator
// L_{l,eta} on the radial grid.
//
// For l >= 1 the stencil is built for u = f / sinh^l(s), which is even and
// regular at the origin; the stored coefficients act on f itself.

#include <complex>
#include <optional>
#include <vector>

#include "fastdiff/closedform.hpp"
#include "fastdiff/geometry.hpp"
#include "fastdiff/ratefit.hpp"

namespace fastdiff {

enum class Boundary { neumann_ghost, dirichlet };

struct TridiagonalOperator {
  RadialGrid grid;
  int ell = 0;
  double eta = 0.0;
  ModelParams params;
  int first = 0;  // first unknown node: 0 when ell = 0, else 1
  // Rows for the unknown nodes first..N-1; sub[0] and sup[last] unused.
  std::vector<double> sub, diag, sup;
  double coupling_end = 0.0;     // coefficient of f_N in row N-1
  std::vector<double> weights;   // diagonal weights in which the matrix is symmetric (zero if none exist)
  std::vector<double> zeroth;    // zeroth-order coefficient of the f-form at each node
  Boundary bc0 = Boundary::neumann_ghost;
  Boundary bcN = Boundary::dirichlet;

  int unknowns() const { return static_cast<int>(diag.size()); }
};

TridiagonalOperator assemble(int ell, double eta, const RadialGrid& grid, const ModelParams& params);

GridFunction apply(const TridiagonalOperator& op, const GridFunction& f);
// Uses f's value at s_max as inhomogeneous Dirichlet data instead of zero.
GridFunction apply_with_boundary(const TridiagonalOperator& op, const GridFunction& f);

// Weighted L2(M) pairing in the operator's own quadrature weights.
double operator_inner(const TridiagonalOperator& op, const GridFunction& f, const GridFunction& g);

struct DiscreteEigenvalue {
  std::complex<double> value;
  std::optional<ModeIndex> match;
  double match_error = 0.0;
  bool above_threshold = false;
};

struct SpectrumReport {
  std::vector<DiscreteEigenvalue> discrete;  // descending real part
  double threshold = 0.0;
  int ell = 0;
  double eta = 0.0;
  double h = 0.0;
  double s_max = 0.0;
  bool symmetrizable = true;
  int count_above_threshold() const;
};

// Margin below which a discrete value counts as sitting on the threshold.
inline constexpr double kThresholdMargin = 5e-3;

SpectrumReport top_eigenvalues(const TridiagonalOperator& op, int count);
// Full real spectrum of a symmetrizable operator, descending.
std::vector<double> real_spectrum(const TridiagonalOperator& op);

double eigen_residual(const ModeIndex& mode, double eta, const RadialGrid& grid, const ModelParams& params);

struct Projection {
  GridFunction q_part;
  GridFunction p_part;
};
// L2_{u_B^m} projection onto closed-form eigenfunctions; f is read as the
// eta-conjugate (cosh s)^{-eta} of a profile.
Projection project(const GridFunction& f, const std::vector<ModeIndex>& modes, const ModelParams& params,
                   double eta = 0.0);
// Spectral projection onto the discrete eigenvectors of op nearest the
// closed-form eigenvalues of the given modes.
Projection project_discrete(const TridiagonalOperator& op, const GridFunction& f,
                            const std::vector<ModeIndex>& modes);

// Crank-Nicolson stepper with a cached factorization.
class CrankNicolson {
 public:
  CrankNicolson(const TridiagonalOperator& op, double dt);
  void step(std::vector<double>& f) const;  // full grid values, Dirichlet nodes kept at zero
  double dt() const { return dt_; }

 private:
  const TridiagonalOperator* op_;
  double dt_;
  std::vector<double> lower_, cprime_, denom_;
};

GridFunction step_linear(const TridiagonalOperator& op, const GridFunction& f, double dt);

struct SemigroupResult {
  RateFit fit;
  std::vector<double> times;
  std::vector<double> norms;  // sup of the conjugated solution
  GridFunction initial;       // projected data
};

SemigroupResult semigroup_decay(const TridiagonalOperator& op, const GridFunction& f0,
                                const std::vector<ModeIndex>& modes_to_remove, double t_final, double dt,
                                const ModelParams& params, const WindowPolicy& policy = {});

}  // namespace fastdiff
