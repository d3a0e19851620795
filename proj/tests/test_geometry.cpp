#include <cmath>

#include <doctest.h>

#include "fastdiff/error.hpp"
#include "fastdiff/geometry.hpp"

using namespace fastdiff;
using doctest::Approx;

TEST_CASE("radial coordinate") {
  CHECK(r_of_s(0.0) == 0.0);
  CHECK(s_of_r(0.0) == 0.0);
  CHECK(r_of_s(1.0) == Approx(1.1752011936438014));
  for (double r : {1e-3, 1.0, 1e3}) CHECK(std::abs(r_of_s(s_of_r(r)) / r - 1.0) <= 1e-14);
  CHECK(volume_weight(0.3, 1) == 1.0);
  CHECK(volume_weight(40.0, 3) == Approx(1.0));
  CHECK(volume_weight(1.0, 3) == Approx(0.5800).epsilon(1e-4));
}

TEST_CASE("grid") {
  const RadialGrid g = make_grid(12.0, 1200);
  CHECK(g.h() == Approx(0.01));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(g.count) == Approx(12.0));
  const RadialGrid f = refine(g);
  CHECK(f.count == 2400);
  CHECK(f.h() == Approx(0.005));
  CHECK(f.s_max == 12.0);
  CHECK_THROWS_AS(make_grid(12.0, 8), ValidationError);
  CHECK_THROWS_AS(make_grid(-1.0, 100), ValidationError);
}

TEST_CASE("grid function invariants") {
  const RadialGrid g = make_grid(4.0, 64);
  GridFunction f = sample(g, 1, [](double s) { return std::sinh(s); });
  CHECK_NOTHROW(validate(f));
  f.values[0] = 0.1;
  CHECK_THROWS_AS(validate(f), ValidationError);
  GridFunction h = zero_function(g, 0);
  h.values[3] = NAN;
  CHECK_THROWS_AS(validate(h), ValidationError);
}

TEST_CASE("weighted sup") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  for (double eta : {-1.0, 0.0, 0.7}) {
    const GridFunction f = sample(g, 0, [&](double s) { return std::pow(std::cosh(s), eta); });
    CHECK(weighted_sup(f, eta) == Approx(1.0));
  }
  const GridFunction v01 = sample_eigenfunction(g, {0, 1, 0}, 0.0, P);
  CHECK(weighted_sup(v01, 0.0) == Approx(1.0));
  const GridFunction grow = sample(g, 0, [](double s) { return std::exp(s); });
  const double top = weighted_sup(grow, -1.0);
  CHECK(top == Approx(std::exp(12.0) * std::cosh(12.0)));
}

TEST_CASE("Holder seminorm") {
  const RadialGrid g = make_grid(1.0, 100);
  const NormSpec spec{NormSpec::Kind::weighted_holder, 0.0, 0.5};
  CHECK(holder_seminorm(sample(g, 0, [](double) { return 3.0; }), spec) == Approx(0.0).scale(1.0));
  const GridFunction lin = sample(g, 0, [](double s) { return s; });
  CHECK(holder_seminorm(lin, spec) == Approx(1.0));
  GridFunction scaled = lin;
  for (double& v : scaled.values) v *= -2.5;
  CHECK(holder_seminorm(scaled, spec) == Approx(2.5 * holder_seminorm(lin, spec)));
}

TEST_CASE("quadrature and the u_B^m pairing") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const RadialGrid g = make_grid(12.0, 1200);
  const GridFunction f = sample_eigenfunction(g, {0, 0, 0}, P.eta_cr, P);
  const GridFunction v00 = sample_eigenfunction(g, {0, 0, 0}, 0.0, P);
  const GridFunction v01 = sample_eigenfunction(g, {0, 1, 0}, 0.0, P);

  // Isometry: <f,f>_{u_B^m} = int ((cosh s)^{-eta_cr} f)^2 dmu.
  GridFunction sq = v00;
  for (int i = 0; i < g.size(); ++i) {
    const double c = std::pow(std::cosh(g.node(i)), -P.eta_cr) * v00.values[i];
    sq.values[i] = c * c;
  }
  CHECK(inner_product_uBm(v00, v00, P) == Approx(integrate_cigar(sq, P.n)).epsilon(1e-12));

  // Against a 10x finer reference.
  const RadialGrid fine = make_grid(12.0, 12000);
  const GridFunction w = sample_eigenfunction(fine, {0, 0, 0}, 0.0, P);
  const double ref = inner_product_uBm(w, w, P);
  CHECK(std::abs(inner_product_uBm(v00, v00, P) / ref - 1.0) <= 1e-6);

  const double diag = inner_product_uBm(v00, v00, P);
  CHECK(std::abs(inner_product_uBm(v00, v01, P)) <= 1e-8 * diag);
  (void)f;

  const QuadratureResult q = integrate_cigar_with_tail(sq, P.n);
  CHECK(q.tail >= 0.0);
  CHECK(q.tail < 1e-10 * q.value);
}
