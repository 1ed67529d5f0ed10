#pragma once

#include <vector>

#include "pencil/coefficients.hpp"

namespace pencil {

/// A sampled solution of y'' + (lambda^2 - 2 lambda p(x) - q(x)) y = 0 on a
/// uniform grid over [0, T]. True values are (y, yp) * exp(scale_log); the
/// stored values stay finite even when the solution grows like
/// exp(|Im lambda| x).
struct SolutionTrace {
  Complex lambda{0.0, 0.0};
  double T = 0.0;
  std::vector<Complex> y;   // size n+1, at x_i = i*T/n
  std::vector<Complex> yp;  // derivative values at the same nodes
  double scale_log = 0.0;

  int n() const { return static_cast<int>(y.size()) - 1; }
  double x_at(int i) const { return T * static_cast<double>(i) / n(); }

  /// Cubic Hermite interpolation of y between grid nodes.
  Complex value_at(double x) const;
  /// Derivative of the Hermite interpolant; one order less accurate off-grid.
  Complex deriv_at(double x) const;

  bool same_grid(const SolutionTrace& o) const {
    return n() == o.n() && T == o.T;
  }
};

enum class FromEnd { left, right };

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  int grid_n = 1024;
  int min_grid_n = 512;
  long max_steps = 2'000'000;
  double rescale_threshold = 1e100;

  IntegratorOptions with_grid(int n) const {
    IntegratorOptions o = *this;
    o.grid_n = n;
    return o;
  }
};

/// Propagate the pencil equation for fixed complex lambda from one endpoint,
/// with (y, y') = init there. Adaptive embedded Runge-Kutta 4(5) with step
/// boundaries forced at coefficient breakpoints; dense output onto the
/// uniform grid via cubic Hermite on each accepted step.
SolutionTrace integrate_pencil(const Coefficients& coeffs, Complex lambda,
                               FromEnd from_end, Complex y0, Complex yp0,
                               const IntegratorOptions& opt = {});

/// X1, X2: the pair anchored at x = 0 with (y, y')(0) = (1, 0) and (0, 1).
std::pair<SolutionTrace, SolutionTrace> fundamental_X(
    const Coefficients& coeffs, Complex lambda, const IntegratorOptions& opt = {});

/// Z1, Z2: the pair anchored at x = T with (y, y')(T) = (1, 0) and (0, 1).
std::pair<SolutionTrace, SolutionTrace> fundamental_Z(
    const Coefficients& coeffs, Complex lambda, const IntegratorOptions& opt = {});

/// y_a(x) y_b'(x) - y_a'(x) y_b(x), with both scale factors applied.
Complex wronskian(const SolutionTrace& a, const SolutionTrace& b, double x);

/// Pointwise combination ca * a + cb * b (shared grid and lambda), with the
/// scale logs reconciled. Extra log offsets shift the coefficients by
/// exp(log_ca) and exp(log_cb).
SolutionTrace combine_traces(Complex ca, const SolutionTrace& a, Complex cb,
                             const SolutionTrace& b, double log_ca = 0.0,
                             double log_cb = 0.0);

}  // namespace pencil
