#include <cmath>

#include <doctest.h>

#include "fastdiff/linop.hpp"

using namespace fastdiff;
using doctest::Approx;

namespace {

double sup_abs(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("the Barenblatt direction is in the kernel") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const TridiagonalOperator op = assemble(0, 0.0, g, P);
  const GridFunction v00 = sample_eigenfunction(g, {0, 0, 0}, 0.0, P);
  CHECK(sup_abs(apply(op, v00)) < 1e-3);
  // lambda_01 = -2p sits on the eta = 0 threshold; use eta_cr.
  const TridiagonalOperator opc = assemble(0, P.eta_cr, g, P);
  const GridFunction v01 = sample_eigenfunction(g, {0, 1, 0}, P.eta_cr, P);
  GridFunction Lv = apply_with_boundary(opc, v01);
  double err = 0.0;
  for (int i = 0; i < g.count; ++i) err = std::max(err, std::abs(Lv.values[i] + 6.0 * v01.values[i]));
  CHECK(err < 1e-2);
}

TEST_CASE("eigen residual converges at second order") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const double r1 = eigen_residual({0, 1, 0}, P.eta_cr, make_grid(12.0, 600), P);
  const double r2 = eigen_residual({0, 1, 0}, P.eta_cr, make_grid(12.0, 1200), P);
  CHECK(r1 / r2 == Approx(4.0).epsilon(0.05));
}

TEST_CASE("far-field zeroth-order coefficient approaches c_inf") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  for (double eta : {0.0, P.eta_cr}) {
    const TridiagonalOperator op = assemble(0, eta, g, P);
    CHECK(op.zeroth[g.count - 1] == Approx(potential_profile(eta, P).c_inf).epsilon(1e-6));
  }
}

TEST_CASE("linearity and symmetry") {
  const ModelParams P = derive_params(3, 0.7);
  const RadialGrid g = make_grid(8.0, 400);
  for (int ell : {0, 1, 2}) {
    const TridiagonalOperator op = assemble(ell, 0.0, g, P);
    auto bump = [&](double c) {
      return sample(g, ell, [&](double s) { return std::pow(std::tanh(s), ell) * std::exp(-(s - c) * (s - c)); });
    };
    const GridFunction f = bump(1.0), h = bump(2.5);
    GridFunction comb = f;
    for (int i = 0; i < g.size(); ++i) comb.values[i] = 2.0 * f.values[i] - 0.5 * h.values[i];
    const GridFunction Lf = apply(op, f), Lh = apply(op, h), Lc = apply(op, comb);
    for (int i = 0; i < g.size(); ++i)
      CHECK(Lc.values[i] == Approx(2.0 * Lf.values[i] - 0.5 * Lh.values[i]).epsilon(1e-10).scale(1.0));
    if (op.weights[op.first] > 0.0) {
      const double a = operator_inner(op, f, Lh), b = operator_inner(op, Lf, h);
      CHECK(a == Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("discrete spectrum at eta_cr") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const SpectrumReport r0 = top_eigenvalues(assemble(0, P.eta_cr, g, P), 4);
  CHECK(r0.threshold == Approx(-6.25));
  REQUIRE(r0.count_above_threshold() == 2);
  CHECK(r0.discrete[0].value.real() == Approx(0.0).scale(1.0).epsilon(1e-2));
  CHECK(r0.discrete[1].value.real() == Approx(-6.0).epsilon(1e-2));
  const SpectrumReport r2 = top_eigenvalues(assemble(2, P.eta_cr, g, P), 3);
  REQUIRE(r2.count_above_threshold() == 1);
  CHECK(r2.discrete[0].value.real() == Approx(-12.0).epsilon(1e-2));
  const SpectrumReport r1 = top_eigenvalues(assemble(1, P.eta_cr, g, P), 3);
  REQUIRE(r1.count_above_threshold() >= 1);
  CHECK(r1.discrete[0].value.real() == Approx(-6.0).epsilon(1e-2));
}

TEST_CASE("spectral projection") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const GridFunction f = sample(g, 0, [](double s) { return std::exp(-(s - 1.0) * (s - 1.0)); });
  const std::vector<ModeIndex> modes{{0, 0, 0}, {0, 1, 0}};
  const Projection once = project(f, modes, P);
  const Projection twice = project(once.q_part, modes, P);
  CHECK(sup_abs(twice.p_part) < 1e-10 * sup_abs(f));
  for (int i = 0; i < g.size(); ++i)
    CHECK(once.q_part.values[i] + once.p_part.values[i] == Approx(f.values[i]).epsilon(1e-12).scale(1.0));
  // An eigenfunction lies entirely in the range of Q.
  const Projection e = project(sample_eigenfunction(g, {0, 1, 0}, P.eta_cr, P), modes, P, P.eta_cr);
  CHECK(sup_abs(e.p_part) < 1e-6);
}

TEST_CASE("linear semigroup decays at lambda_01 on v_01") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const TridiagonalOperator op = assemble(0, P.eta_cr, g, P);
  const GridFunction v01 = sample_eigenfunction(g, {0, 1, 0}, P.eta_cr, P);
  // The sampled v_01 carries an O(h^2) kernel component; remove it.
  const SemigroupResult r = semigroup_decay(op, v01, {{0, 0, 0}}, 2.0, 1e-3, P, WindowPolicy{1e-5, 0.5});
  CHECK(r.fit.slope == Approx(-6.0).epsilon(1e-2));
  CHECK(r.norms.front() == Approx(1.0).epsilon(1e-3));
}
