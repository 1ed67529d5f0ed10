#include "doctest.h"
#include "oracles.hpp"
#include "pencil/experiments.hpp"

using namespace pencil;

TEST_CASE("mirror scenario: the reflected pair is spectrally indistinguishable") {
  ScenarioReport rep = run_example1(example1_default_coeffs());
  INFO(report_to_json(rep));
  CHECK(rep.all_passed());
  REQUIRE(rep.find("xi_meets_lambda1"));
  CHECK(rep.find("xi_meets_lambda1")->passed);       // disjointness fails here
  CHECK(rep.find("M_matches_reflected")->measured < 1e-6);
  CHECK(rep.find("omega_equals_delta2")->measured < 1e-6);
  CHECK(rep.find("p_differs_from_reflection")->measured > 0.01);
}

TEST_CASE("mirror scenario preconditions") {
  SUBCASE("reflection-symmetric coefficients are rejected") {
    Coefficients zero(kPi, CoeffFunction::constant(0.0), CoeffFunction::constant(0.0));
    CHECK_THROWS_AS(run_example1(zero), ConfigError);
  }
  SUBCASE("coefficients without the half-period are rejected") {
    // q = sin 2x has period pi, not pi/2.
    Coefficients c(kPi, CoeffFunction::trig(4.0, 0.0, {}, {0.2}),
                   CoeffFunction::trig(2.0, 0.0, {}, {1.0}));
    CHECK_THROWS_AS(run_example1(c), ConfigError);
  }
}

TEST_CASE("short-window scenario: spectrum pinned by the window alone") {
  double alpha = kPi / 4, alpha0 = kPi / 3;
  ScenarioReport rep = run_example2(alpha, alpha0, example2_default_coeffs(alpha0));
  INFO(report_to_json(rep));
  CHECK(rep.all_passed());
  CHECK(rep.find("lambda2_is_pi_n_over_alpha")->measured < 1e-6);
  CHECK(rep.find("condition_S_holds")->passed);
  CHECK(rep.find("omega_differs_from_reflected")->measured > 1e-3);
  CHECK(rep.find("M_matches_reflected")->measured < 1e-6);
}

TEST_CASE("short-window scenario preconditions") {
  SUBCASE("alpha must be below alpha0") {
    CHECK_THROWS_AS(
        run_example2(kPi / 3, kPi / 3, example2_default_coeffs(kPi / 3)),
        ConfigError);
  }
  SUBCASE("coefficients must vanish on the end windows") {
    Coefficients bad(kPi, CoeffFunction::constant(0.1),
                     example2_default_coeffs(kPi / 3).q);
    CHECK_THROWS_AS(run_example2(kPi / 4, kPi / 3, bad), ConfigError);
  }
}

TEST_CASE("mirror scenario diagnostic: q-only asymmetry") {
  // p = 0 is reflection-symmetric; the relaxed variant still exhibits the
  // whole mechanism through q alone.
  Coefficients c(kPi, CoeffFunction::constant(0.0),
                 CoeffFunction::trig(4.0, 0.0, {}, {Complex(1.0, 0.0)}));
  ScenarioOptions opt;
  opt.relax_p_asymmetry = true;
  ScenarioReport rep = run_example1(c, opt);
  INFO(report_to_json(rep));
  CHECK(rep.all_passed());
  CHECK(rep.find("q_only_asymmetry_diagnostic"));
  CHECK(rep.find("xi_meets_lambda1")->passed);
}

TEST_CASE("scenario reports are deterministic") {
  ScenarioReport a = run_example1(example1_default_coeffs());
  ScenarioReport b = run_example1(example1_default_coeffs());
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("three-spectra scenario") {
  SUBCASE("the degenerate flat truth aborts on the overlap at an even integer") {
    Parametrization pm;
    pm.T = kPi;
    pm.p_dim = 1;
    pm.q_dim = 1;
    ThreeSpectraOptions opt;
    opt.roots_per_spectrum = 5;
    ScenarioReport rep = run_three_spectra(kPi / 2, pm, {0.0, 0.0}, opt);
    CHECK(rep.aborted);
    REQUIRE(rep.find("condition_Sprime_holds"));
    CHECK(!rep.find("condition_Sprime_holds")->passed);
    // The overlapping eigenvalue is one of the even integers 2 or 4.
    double re = rep.abort_lambda.real();
    double nearest_even = 2.0 * std::round(re / 2.0);
    CHECK(std::abs(rep.abort_lambda - Complex(nearest_even, 0.0)) < 1e-6);
    CHECK(nearest_even >= 2.0);
  }
  SUBCASE("a must be interior") {
    Parametrization pm;
    pm.T = kPi;
    pm.p_dim = 1;
    pm.q_dim = 1;
    CHECK_THROWS_AS(run_three_spectra(kPi, pm, {0.0, 0.0}, {}), ConfigError);
  }
  SUBCASE("a non-flat truth passes the disjointness check and is recovered") {
    Parametrization pm;
    pm.T = kPi;
    pm.p_dim = 1;
    pm.q_dim = 1;
    pm.fixed_integral_p = Complex(0.3 * kPi, 0.0);
    ThreeSpectraOptions opt;
    opt.roots_per_spectrum = 5;
    opt.start_perturbation = {0.1, 0.1};
    ScenarioReport rep = run_three_spectra(kPi / 2, pm, {0.12, 0.08}, opt);
    INFO(report_to_json(rep));
    CHECK(!rep.aborted);
    CHECK(rep.find("condition_Sprime_holds")->passed);
    REQUIRE(rep.find("recovery_error_small"));
    CHECK(rep.find("recovery_error_small")->passed);
    CHECK(rep.find("recovery_error_small")->measured < 1e-4);
  }
}
