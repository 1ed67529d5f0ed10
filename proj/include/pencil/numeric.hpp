#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace pencil {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Thrown when a ratio of characteristic functions is requested at (or too
/// close to) a zero of the denominator. Carries the offending lambda.
class PoleError : public std::runtime_error {
 public:
  PoleError(Complex lambda, const std::string& what_fn)
      : std::runtime_error("pole of " + what_fn + " at lambda = (" +
                           std::to_string(lambda.real()) + ", " +
                           std::to_string(lambda.imag()) + ")"),
        lambda_(lambda) {}
  Complex lambda() const { return lambda_; }

 private:
  Complex lambda_;
};

class IntegrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SearchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A complex value v together with a log-magnitude offset s; the value
/// represented is v * exp(s). Keeps exponentially large quantities finite.
struct Scaled {
  Complex v{0.0, 0.0};
  double log_s = 0.0;

  static Scaled of(Complex value) { return {value, 0.0}; }

  /// Collapse to a plain complex; may overflow for huge log_s.
  Complex value() const { return v * std::exp(log_s); }

  double log_abs() const {
    double a = std::abs(v);
    return a > 0.0 ? std::log(a) + log_s
                   : -std::numeric_limits<double>::infinity();
  }

  bool is_zero() const { return v == Complex(0.0, 0.0); }

  friend Scaled operator*(const Scaled& a, const Scaled& b) {
    return {a.v * b.v, a.log_s + b.log_s};
  }
  friend Scaled operator/(const Scaled& a, const Scaled& b) {
    return {a.v / b.v, a.log_s - b.log_s};
  }
  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    double s = std::max(a.log_s, b.log_s);
    return {a.v * std::exp(a.log_s - s) + b.v * std::exp(b.log_s - s), s};
  }
  friend Scaled operator-(const Scaled& a, const Scaled& b) {
    double s = std::max(a.log_s, b.log_s);
    return {a.v * std::exp(a.log_s - s) - b.v * std::exp(b.log_s - s), s};
  }
  Scaled operator-() const { return {-v, log_s}; }

  /// Renormalize so |v| is O(1).
  Scaled normalized() const {
    double a = std::abs(v);
    if (a == 0.0 || !std::isfinite(a)) return *this;
    return {v / a, log_s + std::log(a)};
  }
};

/// 2x2 determinant a*d - b*c accumulated in extended precision. The naive
/// double evaluation loses ~|ad| * eps absolutely, which matters for
/// Wronskian identities at large |Im lambda| where ad and bc nearly cancel.
inline Complex det2(Complex a, Complex b, Complex c, Complex d) {
  using CL = std::complex<long double>;
  CL al(a.real(), a.imag()), bl(b.real(), b.imag());
  CL cl(c.real(), c.imag()), dl(d.real(), d.imag());
  CL r = al * dl - bl * cl;
  return Complex(static_cast<double>(r.real()), static_cast<double>(r.imag()));
}

inline bool close_rel(Complex a, Complex b, double tol) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

inline bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace pencil
