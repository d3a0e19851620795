#include <cmath>

#include <doctest.h>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

using namespace fastdiff;
using doctest::Approx;

TEST_CASE("derived parameters") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  CHECK(P.p == Approx(3.0).epsilon(1e-14));
  CHECK(P.beta == Approx(1.0).epsilon(1e-14));
  CHECK(P.eta_cr == Approx(0.5).epsilon(1e-14));
  CHECK(P.a() == Approx(0.5 * (P.n + P.p)).epsilon(1e-14));

  const ModelParams Q = derive_params(3, 0.6);
  CHECK(Q.p == Approx(2.0).epsilon(1e-14));
  CHECK(Q.eta_cr == Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(derive_params(1, 0.5).p == Approx(3.0).epsilon(1e-14));

  CHECK_THROWS_AS(derive_params(3, 1.2), ValidationError);
  CHECK_THROWS_AS(derive_params(3, 0.3), ValidationError);
  CHECK_THROWS_WITH(derive_params(3, 1.2), doctest::Contains("m outside ]m_0,1["));
  CHECK_THROWS_AS(derive_params(0, 0.5), ValidationError);
}

TEST_CASE("landmarks") {
  const ModelParams P = derive_params(3, 0.7);
  CHECK(landmark(3, P.p) == Approx(0.7).epsilon(1e-14));
  const Landmarks L = landmarks(P);
  CHECK(L.m0 == Approx(1.0 / 3.0));
  CHECK(L.m2 == Approx(3.0 / 5.0));
  CHECK(L.mn == Approx(2.0 / 3.0));
  CHECK(L.mn4 == Approx(4.0 / 5.0));
  CHECK_FALSE(L.m_pstar.has_value());
  const Landmarks L2 = landmarks(derive_params(2, 0.7));
  CHECK(L2.m6 == Approx(0.75));
  CHECK(L2.mn4 == Approx(0.75));
  const Landmarks L1 = landmarks(derive_params(1, 0.5));
  REQUIRE(L1.m_pstar.has_value());
  CHECK(*L1.m_pstar == Approx(landmark(1, 2.0 * (std::sqrt(2.0) + 1.0))));
}

TEST_CASE("Barenblatt profile and self-similar map") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  CHECK(barenblatt_u(0.0, P) == Approx(1.0));
  const ModelParams H = derive_params(3, 0.5);
  CHECK(barenblatt_u(1.0, H) == Approx(0.25));
  // log-log slope -(n+p)
  const double x1 = 1e3, x2 = 2e3;
  const double slope = std::log(barenblatt_u(x2, P) / barenblatt_u(x1, P)) / std::log(x2 / x1);
  CHECK(slope == Approx(-(P.n + P.p)).epsilon(1e-5));

  CHECK(barenblatt_rho(0.0, 0.7, P) == Approx(barenblatt_u(0.7, P)));
  const double tau = 2.0;
  CHECK(barenblatt_rho(tau, 0.0, P) ==
        Approx(std::pow(2.0 * P.p * tau + 1.0, -P.n * P.beta) * std::pow(P.B, -1.0 / (1.0 - P.m))));

  const SelfSimilarPoint s0 = to_selfsimilar(0.0, {0.3, -0.2, 0.1}, P);
  CHECK(s0.t == Approx(0.0).scale(1.0));
  CHECK(s0.x[0] == Approx(0.3));
  for (double t : {0.1, 1.0, 100.0}) {
    const std::vector<double> y{0.5, 1.5, -2.0};
    const PhysicalPoint back = from_selfsimilar(to_selfsimilar(t, y, P).t, to_selfsimilar(t, y, P).x, P);
    CHECK(back.tau == Approx(t).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(back.y[i] == Approx(y[i]).epsilon(1e-12));
  }
  CHECK(tau_of_t(1.0, P) == Approx((std::exp(6.0) - 1.0) / 6.0).epsilon(1e-13));
  CHECK(t_of_tau(tau_of_t(0.37, P), P) == Approx(0.37).epsilon(1e-13));
}

TEST_CASE("Barenblatt mass is time independent") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  auto mass = [&](double tau) {
    // r^2 rho dr on a substitution r = tan(theta) to reach infinity.
    const int N = 200000;
    double sum = 0.0;
    for (int i = 1; i < N; ++i) {
      const double th = 0.5 * M_PI * i / N;
      const double r = std::tan(th);
      const double dr = 1.0 / (std::cos(th) * std::cos(th));
      sum += r * r * barenblatt_rho(tau, r, P) * dr;
    }
    return sum * 0.5 * M_PI / N;
  };
  CHECK(mass(0.0) == Approx(mass(3.0)).epsilon(1e-8));
}

TEST_CASE("eigenvalues and thresholds") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  CHECK(eigenvalue({0, 0, 0}, P) == Approx(0.0).scale(1.0));
  CHECK(eigenvalue({1, 0, 0}, P) == Approx(-(P.n + P.p)));
  CHECK(eigenvalue({0, 1, 0}, P) == Approx(-2.0 * P.p));
  const ModelParams Q = derive_params(3, 0.7);
  CHECK(eigenvalue({0, 2, 0}, Q) == Approx(-4.0 * Q.p + 8.0));
  CHECK(eigenvalue({1, 1, 0}, Q) == Approx(-3.0 * Q.p - 3.0 + 4.0));
  CHECK(eigenvalue({2, 0, 0}, Q) == Approx(-2.0 * Q.p - 6.0));

  CHECK(essential_threshold(0, P.eta_cr, P) == Approx(-6.25));
  CHECK(essential_threshold(0, 0.0, P) == Approx(-2.0 * P.p));
  CHECK(essential_threshold(2, P.eta_cr, P) == Approx(-12.25));
  CHECK(continuum_onset(P) == Approx(-6.25));

  const auto modes = admissible_modes(P.eta_cr, P);
  REQUIRE(modes.size() == 4);
  CHECK(modes[0].lambda == Approx(0.0).scale(1.0));
  CHECK(modes[1].lambda == Approx(-6.0));
  CHECK(modes[2].lambda == Approx(-6.0));
  CHECK(modes[3].lambda == Approx(-12.0));
  CHECK(modes[3].mode->ell == 2);

  // triple crossing at p = n + 4
  const ModelParams T = derive_params(3, 0.8);
  CHECK(T.p == Approx(7.0));
  CHECK(eigenvalue({2, 0, 0}, T) == Approx(-20.0));
  CHECK(eigenvalue({1, 1, 0}, T) == Approx(-20.0));
  CHECK(eigenvalue({0, 2, 0}, T) == Approx(-20.0));

  const ModelParams N1 = derive_params(1, 0.5);
  for (const auto& d : admissible_modes(N1.eta_cr, N1)) CHECK(d.mode->ell <= 1);
}

TEST_CASE("potential profile and target rates") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  const PotentialProfile cr = potential_profile(P.eta_cr, P);
  CHECK(cr.c_inf == Approx(-std::pow(P.q(), 2)));
  CHECK(cr.b_inf == Approx(0.0).scale(1.0));
  CHECK(cr.depth == Approx((P.q() + P.n) * P.q()));
  CHECK(potential_profile(0.0, P).c_inf == Approx(-2.0 * P.p));

  CHECK(eta_for_target_rate(continuum_onset(P), P) == Approx(P.eta_cr));
  const ModelParams Q = derive_params(3, 0.7);
  CHECK(eta_for_target_rate(-2.0 * Q.p, Q) == Approx(0.0).scale(1.0).epsilon(1e-12));
  const double L = continuum_onset(Q) + 1e-6;
  const double eta = eta_for_target_rate(L, Q);
  CHECK(eta < Q.eta_cr);
  CHECK(std::abs(essential_threshold(0, eta, Q) - L) <= 1e-12);
  CHECK_THROWS_AS(eta_for_target_rate(continuum_onset(Q) - 1.0, Q), ValidationError);
}

TEST_CASE("second-order rates") {
  const SecondOrderRates a = second_order_rates(derive_params(3, 0.7));
  CHECK(a.gamma == Approx(289.0 / 264.0));
  CHECK(a.delta == Approx(0.125));
  CHECK(a.branch == RateBranch::first);

  const SecondOrderRates b = second_order_rates(derive_params(3, 0.8));
  CHECK(b.gamma == Approx(10.0 / 7.0));
  CHECK(b.delta == Approx(0.2));
  REQUIRE(b.gamma_other.has_value());
  CHECK(*b.gamma_other == Approx(10.0 / 7.0));
  CHECK(*b.delta_other == Approx(0.2));

  const SecondOrderRates c = second_order_rates(derive_params(3, 0.55));
  CHECK(c.gamma == Approx(961.0 / 936.0));
  CHECK(c.delta == Approx(-1.0 / 16.0));
  CHECK(c.branch == RateBranch::subcritical);

  const ModelParams T = derive_params(3, 0.9);
  CHECK(second_order_rates(T).gamma == Approx((T.n + T.p) / T.p));
  CHECK_THROWS_AS(second_order_rates(derive_params(3, 0.6)), ValidationError);
}

TEST_CASE("eigenfunctions") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  for (double r : {0.0, 0.4, 2.5}) {
    CHECK(eigenfunction_psi({0, 0, 0}, r, P) == Approx(1.0));
    CHECK(eigenfunction_psi({2, 0, 0}, r, P) == Approx(r * r));
    CHECK(eigenfunction_psi({0, 1, 0}, r, P) == Approx(1.0 - r * r));
  }
  for (double s : {0.0, 0.7, 3.0}) {
    const double c = std::cosh(s);
    CHECK(eigenfunction_v({0, 0, 0}, s, P) == Approx(1.0 / (c * c)));
    CHECK(eigenfunction_v({0, 1, 0}, s, P) == Approx(2.0 / (c * c) - 1.0));
  }
  CHECK(psi_polynomial({0, 1, 0}, P).exact_rational);
  // v_lk ~ C e^{(l+2k-2)s}
  const ModeIndex md{2, 0, 0};
  const double g = std::log(eigenfunction_v(md, 12.0, P) / eigenfunction_v(md, 11.0, P));
  CHECK(g == Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("delayed Barenblatt quotient") {
  const ModelParams P = derive_params(3, 2.0 / 3.0);
  for (double s : {0.0, 1.0, 5.0}) CHECK(delayed_barenblatt_v(0.7, s, 0.0, P.B, P) == Approx(1.0));
  CHECK(delayed_barenblatt_w(0.7, 2.0, 0.0, P.B, P) == Approx(0.0).scale(1.0).epsilon(1e-15));
  // Large-time decay at lambda_01 towards u_{B+}/u_B.
  const double Bp = 0.8;
  auto dev = [&](double t) {
    const double lim = std::pow((P.B + 1.0) / (Bp + 1.0), P.a());  // s with sinh s = 1
    return std::abs(delayed_barenblatt_v(t, std::asinh(1.0), 0.1, Bp, P) - lim);
  };
  CHECK(std::log(dev(3.0) / dev(2.0)) == Approx(-2.0 * P.p).epsilon(2e-2));
}

TEST_CASE("affine family") {
  const ModelParams P = derive_params(2, 0.75);
  CHECK(affine_cB_calibrated(P) == Approx(affine_cB_closed_form(P)).epsilon(1e-4));
  Eigen::MatrixXd S0 = Eigen::MatrixXd::Zero(2, 2);
  S0(0, 0) = 0.3;
  S0(1, 1) = -0.3;
  const AffineState st = make_affine_state(S0, 1.0, P);
  CHECK_THROWS_AS(make_affine_state(Eigen::MatrixXd::Identity(2, 2), 1.0, P), ValidationError);

  // Fourth-order sigma trajectory: halving the step cuts the error about 16x.
  auto sigma_at = [&](double dtau) {
    AffineState s = st;
    const int steps = static_cast<int>(std::lround(1.0 / dtau));
    for (int i = 0; i < steps; ++i) s = affine_step(s, dtau, P);
    return s.sigma;
  };
  const double ref = sigma_at(1e-4);
  const double e1 = std::abs(sigma_at(0.025) - ref), e2 = std::abs(sigma_at(0.0125) - ref);
  CHECK(e1 / e2 == Approx(16.0).epsilon(0.25));

  // Sigma0 = 0: isotropic Barenblatt rescaling.
  const AffineState iso = make_affine_state(Eigen::MatrixXd::Zero(2, 2), 1.0, P);
  Eigen::VectorXd y(2);
  y << 0.4, -0.3;
  CHECK(affine_density(iso, y, P) == Approx(barenblatt_u(y.norm(), P)));
  // The residual is pure discretization error.
  const double r1 = affine_pde_residual(iso, 1e-2, 1e-2, 2.0, 6, P).scaled();
  const double r2 = affine_pde_residual(iso, 5e-3, 5e-3, 2.0, 6, P).scaled();
  CHECK(r1 / r2 == Approx(4.0).epsilon(0.05));
}
