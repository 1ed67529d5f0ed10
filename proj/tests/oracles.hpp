#pragma once

// Closed-form references used as independent oracles. Everything here is
// derived by hand from the constant-coefficient equation
//   y'' + (lambda^2 - 2 lambda c - q0) y = 0,  k^2 = lambda^2 - 2 lambda c - q0,
// whose normalized solutions are cos(kx) and sin(kx)/k; the checks in the
// test files compare solver output against these, never the other way
// around.

#include <complex>

#include "pencil/problem.hpp"

namespace oracle {

using pencil::Complex;
using pencil::kPi;

inline Complex csin(Complex z) { return std::sin(z); }
inline Complex ccos(Complex z) { return std::cos(z); }

// sin(kx)/k with the k -> 0 limit.
inline Complex sinc_k(Complex k, double x) {
  if (std::abs(k) < 1e-8) {
    Complex kx = k * x;
    return x * (1.0 - kx * kx / 6.0);  // two-term series, error O((kx)^4 x)
  }
  return std::sin(k * x) / k;
}

// Branch k(lambda) for constant p = c, q = q0.
inline Complex k_of(Complex lambda, Complex c = 0.0, Complex q0 = 0.0) {
  return std::sqrt(lambda * lambda - 2.0 * lambda * c - q0);
}

// Fundamental pair anchored at 0 for constant coefficients.
inline Complex X1(Complex lambda, double x, Complex c = 0.0, Complex q0 = 0.0) {
  return ccos(k_of(lambda, c, q0) * x);
}
inline Complex X2(Complex lambda, double x, Complex c = 0.0, Complex q0 = 0.0) {
  return sinc_k(k_of(lambda, c, q0), x);
}

// Pair anchored at T.
inline Complex Z1(Complex lambda, double x, double T, Complex c = 0.0,
                  Complex q0 = 0.0) {
  return ccos(k_of(lambda, c, q0) * (x - T));
}
inline Complex Z2(Complex lambda, double x, double T, Complex c = 0.0,
                  Complex q0 = 0.0) {
  return sinc_k(k_of(lambda, c, q0), x - T);
}

// With a unit atom at 0 as the first form: delta1 = sin(kT)/k,
// delta11 = cos(kT).
inline Complex delta1(Complex lambda, double T, Complex c = 0.0,
                      Complex q0 = 0.0) {
  return sinc_k(k_of(lambda, c, q0), T);
}
inline Complex delta11(Complex lambda, double T, Complex c = 0.0,
                       Complex q0 = 0.0) {
  return ccos(k_of(lambda, c, q0) * T);
}

// The free problem on [0, pi] with point forms at 0 and pi/2.
inline pencil::ProblemSpec free_problem(double u2_at = kPi / 2) {
  pencil::Coefficients c(kPi, pencil::CoeffFunction::constant(0.0),
                         pencil::CoeffFunction::constant(0.0));
  auto u1 = pencil::BoundaryMeasure::point(kPi, 0.0, 1.0, 1);
  auto u2 = pencil::BoundaryMeasure::point(kPi, u2_at, 1.0, 2);
  return pencil::ProblemSpec(std::move(c), std::move(u1), std::move(u2), true);
}

inline pencil::ProblemSpec const_p_problem(double c_val, double u2_at = kPi / 2) {
  pencil::Coefficients c(kPi, pencil::CoeffFunction::constant(c_val),
                         pencil::CoeffFunction::constant(0.0));
  auto u1 = pencil::BoundaryMeasure::point(kPi, 0.0, 1.0, 1);
  auto u2 = pencil::BoundaryMeasure::point(kPi, u2_at, 1.0, 2);
  return pencil::ProblemSpec(std::move(c), std::move(u1), std::move(u2), true);
}

}  // namespace oracle
