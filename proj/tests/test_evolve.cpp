#include <cmath>

#include <doctest.h>

#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/linop.hpp"

using namespace fastdiff;
using doctest::Approx;

TEST_CASE("pointwise nonlinearities") {
  CHECK(energy_density(1.0, 0.5) == Approx((std::pow(2.0, 1.5) - 2.5) / 0.75));
  CHECK(energy_density(1.0, 0.5) == Approx(0.43790).epsilon(1e-4));
  CHECK(energy_density(0.0, 0.7) == 0.0);
  CHECK(energy_density(1e-4, 0.7) == Approx(0.5e-8).epsilon(1e-3));
  CHECK(h_of_w(1e-12, 0.7) == Approx(1e-12).epsilon(1e-9));
  CHECK(h_of_w(1.0, 0.5) == Approx((std::sqrt(2.0) - 1.0) / 0.5));
  // w - m h(w) is quadratic for small w.
  CHECK(reaction_of_w(1e-4, 0.7) == Approx(0.5 * (1.0 - 0.7) * 1e-8).epsilon(1e-3));
}

TEST_CASE("the Barenblatt is a fixed point") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 600);
  const GridFunction r = nonlinear_rhs(zero_function(g, 0), P);
  for (double v : r.values) CHECK(v == 0.0);
  EvolutionState st{0.0, zero_function(g, 0), P, {}};
  const EvolutionState next = step_nonlinear(st, 1e-2);
  for (double v : next.w.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("small perturbations follow the linearized operator") {
  const ModelParams P = derive_params(3, 0.7);
  const RadialGrid g = make_grid(8.0, 400);
  const TridiagonalOperator op = assemble(0, 0.0, g, P);
  const double eps = 1e-6;
  const GridFunction f = sample(g, 0, [](double s) { return std::exp(-(s - 1.5) * (s - 1.5)); });
  GridFunction small = f;
  for (double& v : small.values) v *= eps;
  const GridFunction N = nonlinear_rhs(small, P), L = apply(op, f);
  double top = 0.0, err = 0.0;
  for (int i = 10; i < g.count - 5; ++i) {
    top = std::max(top, std::abs(L.values[i]));
    err = std::max(err, std::abs(N.values[i] / eps - L.values[i]));
  }
  CHECK(err < 1e-2 * top);
}

TEST_CASE("mass and moments") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  CHECK(mass_and_moments(zero_function(g, 0), P).mass_defect == 0.0);
  const GridFunction e = eigenmode_data(g, 1, 0.05, P);
  CHECK(std::abs(mass_and_moments(e, P).mass_defect) < 1e-15);
  const GridFunction b = bump_data(g, 0.05, 7, P, true);
  CHECK(std::abs(mass_and_moments(b, P).mass_defect) < 1e-15);
  const GridFunction raw = bump_data(g, 0.05, 7, P, false);
  CHECK(std::abs(mass_and_moments(raw, P).mass_defect) > 1e-6);
  double top = 0.0;
  for (double v : b.values) top = std::max(top, std::abs(v));
  CHECK(top == Approx(0.05));
  // Same seed, same data.
  CHECK(bump_data(g, 0.05, 7, P).values == b.values);
  CHECK_THROWS_AS(bump_data(g, 0.0, 7, P), ValidationError);
}

TEST_CASE("conservation and comparison on a short run") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 600);
  EvolutionState st{0.0, bump_data(g, 0.05, 2, P), P, {}};
  const Envelope env = comparison_envelope(st.w, P);
  CHECK(env.lower < 1.0);
  CHECK(env.upper > 1.0);
  const EvolutionTrace tr = run(st, 1e-3, 0.5, RecordOptions{10, {}, 0, true});
  for (double m : tr.mass) CHECK(std::abs(m) < 1e-14);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(env.lower <= tr.min_v[i] + 1e-12);
    CHECK(tr.max_v[i] <= env.upper + 1e-12);
  }
  for (std::size_t i = 1; i < tr.energy.size(); ++i) CHECK(tr.energy[i] <= tr.energy[i - 1] * (1.0 + 1e-12));
  CHECK(tr.sup_norms.back() < tr.sup_norms.front());
}

TEST_CASE("eigenmode data decays at lambda_01") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  EvolutionState st{0.0, eigenmode_data(g, 1, 1e-3, P), P, {}};
  StepOptions opt;
  opt.extrapolate = true;
  const EvolutionTrace tr = run(st, 1e-3, 1.0, RecordOptions{10, {}, 0, false}, opt);
  const RateFit fit = fit_rate(tr.times, tr.sup_norms, WindowPolicy{1e-7, 1e-2});
  CHECK(fit.slope == Approx(-6.0).epsilon(1e-2));
}
