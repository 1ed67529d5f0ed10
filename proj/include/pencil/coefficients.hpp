#pragma once

#include <vector>

#include "pencil/numeric.hpp"

namespace pencil {

/// One coefficient function on [0, T]. Three families are supported:
///   constant          f(x) = value
///   piecewise_linear  breakpoints x_0 = 0 < ... < x_m = T with complex
///                     values, linear in between
///   trig              f(x) = c0 + sum_k (a_k cos(k w x) + b_k sin(k w x))
/// All families have closed-form antiderivatives, so running integrals are
/// exact (no quadrature).
struct CoeffFunction {
  enum class Family { Constant, PiecewiseLinear, Trig };

  Family family = Family::Constant;

  // Constant
  Complex value{0.0, 0.0};

  // PiecewiseLinear: nodes.size() == vals.size() >= 2, nodes strictly
  // increasing, nodes.front() == 0, nodes.back() == T.
  std::vector<double> nodes;
  std::vector<Complex> vals;

  // Trig
  double omega = 1.0;
  Complex c0{0.0, 0.0};
  std::vector<Complex> cos_coeff;  // k = 1..K
  std::vector<Complex> sin_coeff;

  static CoeffFunction constant(Complex v);
  static CoeffFunction piecewise_linear(std::vector<double> x,
                                        std::vector<Complex> v);
  static CoeffFunction trig(double omega, Complex c0,
                            std::vector<Complex> cos_coeff,
                            std::vector<Complex> sin_coeff);

  Complex eval(double x) const;
  /// Antiderivative from 0: integral of f over [0, x], closed form.
  Complex integral(double x) const;
  /// Interior points where smoothness may break (piecewise-linear nodes).
  std::vector<double> breakpoints() const;
  /// The function x -> f(T - x), within the same family.
  CoeffFunction reflected(double T) const;

  bool is_zero() const;
};

/// Problem coefficients: the pair (p, q) on [0, T].
struct Coefficients {
  double T = kPi;
  CoeffFunction p;
  CoeffFunction q;

  Coefficients() = default;
  Coefficients(double T_, CoeffFunction p_, CoeffFunction q_);

  Coefficients reflected() const;
  std::vector<double> breakpoints() const;
};

enum class Which { p, q };

/// Value of the chosen coefficient at x in [0, T].
Complex evaluate_coeff(const Coefficients& c, Which which, double x);

/// Integral of p over [0, x], computed analytically from the representation.
Complex integral_p(const Coefficients& c, double x);

}  // namespace pencil
