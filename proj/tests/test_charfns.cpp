#include "doctest.h"
#include "oracles.hpp"
#include "pencil/charfns.hpp"
#include "pencil/validate.hpp"

using namespace pencil;

namespace {

double rel(Complex got, Complex want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("characteristic values on the free problem") {
  ProblemSpec prob = oracle::free_problem();
  CharEngine engine(prob);

  SUBCASE("delta1 = sin(lambda T)/lambda") {
    CharEvaluation e = engine.eval(CharName::delta1, 0.5);
    CHECK(rel(e.value, 2.0) < 1e-9);
    CharEvaluation x = engine.eval(CharName::delta1, 0.5, EvalPath::det_of_X);
    CHECK(rel(x.value, 2.0) < 1e-9);
  }
  SUBCASE("delta11 = cos(lambda T)") {
    CharEvaluation e = engine.eval(CharName::delta11, 1.0);
    CHECK(rel(e.value, -1.0) < 1e-9);
  }
  SUBCASE("M = delta2/delta1 with the midpoint form") {
    CharEvaluation e = engine.eval(CharName::weylM, 0.5, EvalPath::ratio);
    CHECK(rel(e.value, std::sqrt(2.0) / 2.0) < 1e-9);
    CHECK(!e.at_pole);
  }
  SUBCASE("oracle sweep over a few lambda") {
    for (Complex z : {Complex(0.7, 0.0), Complex(2.2, 0.8), Complex(-1.3, -0.4)}) {
      CHECK(rel(engine.eval(CharName::delta1, z).value, oracle::delta1(z, kPi)) < 1e-8);
      CHECK(rel(engine.eval(CharName::delta11, z).value, oracle::delta11(z, kPi)) < 1e-8);
    }
  }
  SUBCASE("ratio at a zero of the denominator is flagged") {
    // delta1 vanishes at integer lambda.
    CharEvaluation e = engine.eval(CharName::weylM, 1.0);
    CHECK(e.at_pole);
  }
}

TEST_CASE("combined solutions satisfy their defining conditions") {
  ProblemSpec prob = oracle::free_problem();
  CharEngine engine(prob);
  Complex lambda{1.0, 0.0};

  SUBCASE("phi reduces to sin x when the first form is the origin atom") {
    SolutionTrace phi = engine.combined(Solution::phi, lambda);
    for (double x : {0.5, 1.5, 2.5})
      CHECK(rel(phi.value_at(x) * std::exp(phi.scale_log), std::sin(x)) < 1e-9);
  }
  SUBCASE("psi has a unit negative derivative condition at T") {
    SolutionTrace psi = engine.combined(Solution::psi, Complex{1.7, 0.4});
    CHECK(std::abs(apply_point_form(2, psi) + 1.0) < 1e-9);
    CHECK(std::abs(apply_point_form(1, psi)) < 1e-9);
  }
  SUBCASE("the Weyl solution is normalized by the first form") {
    SolutionTrace w = engine.combined(Solution::weyl, Complex{1.6, 0.3});
    CHECK(std::abs(apply_measure_form(prob.u1, w) - 1.0) < 1e-8);
    CHECK(std::abs(apply_point_form(1, w)) < 1e-8);
  }
  SUBCASE("v2 is annihilated by the first form and v2(T) = N") {
    Complex z{1.3, 0.2};
    SolutionTrace v2 = engine.combined(Solution::v2, z);
    CHECK(std::abs(apply_measure_form(prob.u1, v2)) < 1e-8);
    Complex N = engine.eval(CharName::bigN, z).value;
    CHECK(rel(apply_point_form(1, v2), N) < 1e-8);
    CHECK(rel(apply_point_form(2, v2), 1.0) < 1e-10);
  }
  SUBCASE("weyl at a pole raises the pole signal") {
    CHECK_THROWS_AS(engine.combined(Solution::weyl, Complex{1.0, 0.0}), PoleError);
  }
}

TEST_CASE("truncated characteristic functions") {
  SUBCASE("a = T reproduces the plain values") {
    ProblemSpec prob = make_random_problem(41);
    CharEngine engine(prob);
    Complex z{2.1, 0.7};
    auto [d1a, d11a] = engine.truncated_deltas(kPi, z);
    CHECK(rel(d1a, engine.eval(CharName::delta1, z).value) < 1e-12);
    CHECK(rel(d11a, engine.eval(CharName::delta11, z).value) < 1e-12);
  }
  SUBCASE("origin atom only: independent of a") {
    ProblemSpec prob = oracle::free_problem();
    CharEngine engine(prob);
    Complex z{0.8, 0.1};
    auto full = engine.truncated_deltas(kPi, z);
    for (double a : {0.4, 1.0, 2.0})
      CHECK(engine.truncated_deltas(a, z) == full);
  }
  SUBCASE("density supported past the cut is removed entirely") {
    // First measure: origin atom plus density on (T/2, T].
    Coefficients c(kPi, CoeffFunction::constant(0.0), CoeffFunction::constant(0.0));
    BoundaryMeasure u1;
    u1.T = kPi;
    u1.label = 1;
    u1.atoms = {{0.0, 1.0}};
    const int G = 513;
    u1.density.assign(G, Complex{});
    for (int i = 0; i < G; ++i) {
      double t = kPi * i / (G - 1);
      if (t > kPi / 2) u1.density[i] = Complex(1.0, 0.0);
    }
    BoundaryMeasure u2 = BoundaryMeasure::point(kPi, kPi / 2, 1.0, 2);
    ProblemSpec prob(c, u1, u2, true);
    CharEngine engine(prob);
    Complex z{0.5, 0.0};
    auto [d1, d11] = engine.truncated_deltas(kPi / 2, z);
    CHECK(rel(d1, 2.0) < 1e-9);  // sin(lambda T)/lambda at 0.5
    (void)d11;
  }
  SUBCASE("bad cut points are rejected") {
    ProblemSpec prob = oracle::free_problem();
    CharEngine engine(prob);
    CHECK_THROWS_AS(engine.truncated_deltas(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(engine.truncated_deltas(kPi + 1.0, 1.0), std::domain_error);
  }
}

TEST_CASE("combined solutions match their determinant displays") {
  // The stable construction routes coincide with the textbook combinations
  // where both are representable.
  ProblemSpec prob = make_random_problem(83);
  CharEngine engine(prob);
  for (Complex z : {Complex(1.9, 0.5), Complex(-3.2, -0.8)}) {
    auto X = engine.traces_X(z);
    auto Z = engine.traces_Z(z);

    // psi = X1 V1(X2) - X2 V1(X1), built here directly from the X pair.
    Complex c1 = apply_point_form(1, X->first), c2 = apply_point_form(1, X->second);
    SolutionTrace psi_x = combine_traces(c2, X->first, -c1, X->second);
    SolutionTrace psi = engine.combined(Solution::psi, z);
    for (double x : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
      Complex a = psi_x.value_at(x) * std::exp(psi_x.scale_log);
      Complex b = psi.value_at(x) * std::exp(psi.scale_log);
      CHECK(rel(a, b) < 1e-7);
    }

    // v2 = Z2 + N Z1.
    Complex N = engine.eval(CharName::bigN, z).value;
    SolutionTrace v2_display = combine_traces(1.0, Z->second, N, Z->first);
    SolutionTrace v2 = engine.combined(Solution::v2, z);
    for (double x : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
      Complex a = v2_display.value_at(x) * std::exp(v2_display.scale_log);
      Complex b = v2.value_at(x) * std::exp(v2.scale_log);
      CHECK(rel(a, b) < 1e-7);
    }
  }
}

TEST_CASE("omega path agreement on the low band") {
  // Both determinant routes for omega are representable only while the
  // cancelled factor exp(2 Im lambda T) stays small; the band |Im| <= 1
  // exercises the redundancy without running into double-precision limits.
  ProblemSpec prob = make_random_problem(77);
  CharEngine engine(prob);
  for (Complex z : {Complex(-8.0, 0.3), Complex(0.9, -1.0), Complex(5.5, 0.7),
                    Complex(9.7, -0.2)}) {
    Complex a = engine.eval(CharName::omega, z, EvalPath::det_of_X).scaled().value();
    Complex b = engine.eval(CharName::omega, z, EvalPath::via_Z).scaled().value();
    CHECK(rel(a, b) < 1e-7);
  }
}

TEST_CASE("identity suite on random problems") {
  // Determinant-path agreement, the Wronskian identities, the Weyl
  // consistency, the unit Wronskian, and the truncation identity, all on a
  // reduced grid (the acceptance suite runs the full one).
  for (std::uint64_t seed : {201, 202}) {
    ProblemSpec prob = make_random_problem(seed);
    ValidateOptions vopt;
    vopt.n_re = 6;
    vopt.n_im = 4;
    ValidateReport rep = validate_problem(prob, vopt);
    for (const auto& c : rep.checks) {
      INFO(c.name, " measured=", c.measured);
      CHECK(c.passed);
    }
    CHECK(!rep.omega_maybe_identically_zero);
  }
}

TEST_CASE("truncation identity in absolute terms at moderate lambda") {
  ProblemSpec prob = make_random_problem(55);
  CharEngine engine(prob);
  const double T = prob.T();
  for (Complex z : {Complex(1.1, 0.4), Complex(-2.6, 0.9), Complex(4.2, -1.1)}) {
    auto trZ = engine.traces_Z(z);
    for (double a : {T, T / 2, T / 4}) {
      auto [d1h, d11h] = engine.truncated_deltas(a / 2, z);
      auto [d1a, d11a] = engine.truncated_deltas(a, z);
      BoundaryMeasure window = restrict_measure(prob.u1, a / 2, a);
      Complex q2 = apply_measure_form(window, trZ->second);
      Complex q1 = apply_measure_form(window, trZ->first);
      CHECK(std::abs((d1h - d1a) - q2) <= 1e-8);
      CHECK(std::abs((d11h - d11a) + q1) <= 1e-8);
    }
  }
}
