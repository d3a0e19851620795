#include <cmath>

#include <doctest.h>

#include "fastdiff/asymptotics.hpp"
#include "fastdiff/error.hpp"

using namespace fastdiff;
using doctest::Approx;

TEST_CASE("rate fits on pure exponentials") {
  std::vector<double> t, v, scaled;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.05 * i);
    v.push_back(0.01 * std::exp(-3.25 * t.back()));
    scaled.push_back(42.0 * v.back());
  }
  const WindowPolicy any{1e-300, 1e300};
  const RateFit a = fit_rate(t, v, any);
  CHECK(std::abs(a.slope + 3.25) < 1e-12);
  CHECK(a.r_squared == Approx(1.0));
  const RateFit b = fit_rate(t, scaled, any);
  CHECK(std::abs(b.slope - a.slope) < 1e-12);
  CHECK(b.intercept - a.intercept == Approx(std::log(42.0)));
  const RateFit w = fit_rate(t, v, WindowPolicy{1e-6, 1e-3});
  CHECK(w.t_lo >= std::log(10.0) / 3.25 - 0.05);
  CHECK(w.samples < 101);
  CHECK_THROWS_AS(fit_rate(t, v, WindowPolicy{1e-30, 1e-29}), ValidationError);
}

TEST_CASE("coefficient of pure eigenmode data") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const GridFunction w = eigenmode_data(g, 1, 0.05, P);
  const double c01 = coefficient_at(g, w.values, 0.0, {0, 1, 0}, P);
  CHECK(c01 == Approx(0.05).epsilon(1e-3));
  CHECK(std::abs(coefficient_at(g, w.values, 0.0, {0, 0, 0}, P)) < 1e-12);
  // c(t) undoes the e^{lambda t} factor.
  GridFunction later = w;
  for (double& x : later.values) x *= std::exp(-6.0 * 0.5);
  CHECK(coefficient_at(g, later.values, 0.5, {0, 1, 0}, P) == Approx(c01).epsilon(1e-12));
}

TEST_CASE("coefficient extraction from a run") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  EvolutionState st{0.0, eigenmode_data(g, 1, 0.01, P), P, {}};
  StepOptions opt;
  opt.extrapolate = true;
  const EvolutionTrace tr = run(st, 1e-3, 1.5, RecordOptions{10, {}, 5, false}, opt);
  const CoefficientRecord c = extract_coefficient(tr, {0, 1, 0}, P);
  CHECK(c.limit == Approx(0.01).epsilon(2e-2));
  CHECK_FALSE(c.tail_flagged);
}

TEST_CASE("shifted error vanishes on the delayed Barenblatt") {
  const ModelParams P = derive_params(3, 0.7);
  const RadialGrid g = make_grid(12.0, 1200);
  const double tau0 = 0.05;
  for (double t : {0.0, 0.5, 2.0}) {
    const GridFunction w = delayed_barenblatt_data(g, t, tau0, P.B, P);
    double top = 0.0;
    for (double e : shifted_error(g, w.values, t, tau0, P)) top = std::max(top, std::abs(e));
    CHECK(top < 1e-12);
  }
}
