#pragma once
// Nonlinear radial evolution of the relative density v = 1 + w = u/u_B in
// self-similar variables, discretized as a conservative finite-volume scheme
// in the geodesic radius s.

#include <cstdint>
#include <functional>
#include <vector>

#include "fastdiff/closedform.hpp"
#include "fastdiff/geometry.hpp"

namespace fastdiff {

// Smallest admissible value of 1 + w.
inline constexpr double kPositivityFloor = 1e-3;

// h(w) = ((1+w)^m - 1)/m and the reaction part w - m h(w), cancellation-free.
double h_of_w(double w, double m);
double reaction_of_w(double w, double m);
// H(w) = [(1+w)^{m+1} - 1 - (m+1)w]/(m(m+1)).
double energy_density(double w, double m);

// Outer edge s_max: outflow drops only the diffusive flux, no_flux closes the
// domain, dirichlet prescribes w.
struct OuterBoundary {
  enum class Kind { outflow, no_flux, dirichlet };
  Kind kind = Kind::outflow;
  std::function<double(double)> value;  // w(t, s_max) for dirichlet
};

struct EvolutionState {
  double t = 0.0;
  GridFunction w;
  ModelParams params;
  OuterBoundary outer;
};

struct StepOptions {
  double newton_tol = 1e-10;
  int max_newton = 20;
  int max_halvings = 8;
  bool extrapolate = false;  // 2 * (two half steps) - (one full step)
};

// Per-grid geometric coefficients of the scheme.
class RadialScheme {
 public:
  RadialScheme(const RadialGrid& grid, const ModelParams& params);

  const RadialGrid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  // Cell masses int_cell u_B dx / (surface and B factors), used for conservation.
  const std::vector<double>& cell_mass() const { return mass_; }

  // dv/dt at every node (zero at a Dirichlet node).
  std::vector<double> rhs(const std::vector<double>& w, OuterBoundary::Kind outer) const;

  // One backward-Euler step; outer_value is used for a Dirichlet edge.
  // Returns the number of Newton iterations, or -1 if Newton failed.
  int backward_euler(std::vector<double>& w, double dt, OuterBoundary::Kind outer, double outer_value,
                     const StepOptions& opt) const;

 private:
  RadialGrid grid_;
  ModelParams params_;
  std::vector<double> mass_;
  // Scaled coefficients at node i for the right/left faces.
  std::vector<double> kp_, km_, rp_, rm_;
  double out_ = 0.0;  // transport flux coefficient at s_max
};

GridFunction nonlinear_rhs(const GridFunction& w, const ModelParams& params);
EvolutionState step_nonlinear(const EvolutionState& state, double dt, const StepOptions& opt = {});

struct RecordOptions {
  int every = 1;                 // record every this many steps
  std::vector<double> etas;      // extra weighted sup norms
  int snapshot_every = 0;        // 0: no snapshots; else every k-th record
  bool energy = true;
};

struct Snapshot {
  double t;
  std::vector<double> w;
};

struct EvolutionTrace {
  RadialGrid grid;
  ModelParams params;
  std::vector<double> times;
  std::vector<double> sup_norms;
  std::vector<double> etas;
  std::vector<std::vector<double>> weighted_norms;  // [eta index][record]
  std::vector<double> mass;                         // mass defect
  std::vector<double> energy;
  std::vector<double> min_v, max_v;
  std::vector<Snapshot> snapshots;
  int newton_iterations = 0;
  int halvings = 0;
};

EvolutionTrace run(const EvolutionState& state0, double dt, double t_final, const RecordOptions& record = {},
                   const StepOptions& opt = {});

// ------------------------------------------------------------- diagnostics

struct MassMoments {
  double mass_defect = 0.0;
  double second_moment = 0.0;
  bool second_moment_finite = true;
};
MassMoments mass_and_moments(const GridFunction& w, const ModelParams& params);
double energy(const GridFunction& w, const ModelParams& params);

struct Envelope {
  double lower;
  double upper;
};
Envelope comparison_envelope(const GridFunction& w0, const ModelParams& params);

// -------------------------------------------------------- initial data

GridFunction eigenmode_data(const RadialGrid& grid, int k, double amplitude, const ModelParams& params);
// Sum of smooth random bumps with the mass mode removed in the scheme's own
// quadrature, scaled to sup |w| = amplitude.
GridFunction bump_data(const RadialGrid& grid, double amplitude, std::uint64_t seed, const ModelParams& params,
                       bool project_mass = true);
GridFunction delayed_barenblatt_data(const RadialGrid& grid, double t, double tau0, double Bplus,
                                     const ModelParams& params);

}  // namespace fastdiff
