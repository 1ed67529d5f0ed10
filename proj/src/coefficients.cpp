#include "pencil/coefficients.hpp"

#include <algorithm>

namespace pencil {

CoeffFunction CoeffFunction::constant(Complex v) {
  CoeffFunction f;
  f.family = Family::Constant;
  f.value = v;
  return f;
}

CoeffFunction CoeffFunction::piecewise_linear(std::vector<double> x,
                                              std::vector<Complex> v) {
  if (x.size() != v.size() || x.size() < 2)
    throw ConfigError("piecewise_linear: need matching node/value lists, >= 2 nodes");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw ConfigError("piecewise_linear: nodes must be strictly increasing");
  CoeffFunction f;
  f.family = Family::PiecewiseLinear;
  f.nodes = std::move(x);
  f.vals = std::move(v);
  return f;
}

CoeffFunction CoeffFunction::trig(double omega, Complex c0,
                                  std::vector<Complex> cos_coeff,
                                  std::vector<Complex> sin_coeff) {
  if (!(omega > 0.0)) throw ConfigError("trig: omega must be positive");
  CoeffFunction f;
  f.family = Family::Trig;
  f.omega = omega;
  f.c0 = c0;
  f.cos_coeff = std::move(cos_coeff);
  f.sin_coeff = std::move(sin_coeff);
  return f;
}

Complex CoeffFunction::eval(double x) const {
  switch (family) {
    case Family::Constant:
      return value;
    case Family::PiecewiseLinear: {
      if (x <= nodes.front()) return vals.front();
      if (x >= nodes.back()) return vals.back();
      auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
      std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
      double t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
      return vals[i] + t * (vals[i + 1] - vals[i]);
    }
    case Family::Trig: {
      Complex s = c0;
      for (std::size_t k = 0; k < cos_coeff.size(); ++k)
        s += cos_coeff[k] * std::cos((k + 1) * omega * x);
      for (std::size_t k = 0; k < sin_coeff.size(); ++k)
        s += sin_coeff[k] * std::sin((k + 1) * omega * x);
      return s;
    }
  }
  return {};
}

Complex CoeffFunction::integral(double x) const {
  switch (family) {
    case Family::Constant:
      return value * x;
    case Family::PiecewiseLinear: {
      // Cumulative trapezoid over whole segments plus the partial segment.
      Complex acc{0.0, 0.0};
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double x0 = nodes[i], x1 = nodes[i + 1];
        if (x <= x0) break;
        if (x >= x1) {
          acc += 0.5 * (vals[i] + vals[i + 1]) * (x1 - x0);
        } else {
          Complex fx = eval(x);
          acc += 0.5 * (vals[i] + fx) * (x - x0);
          break;
        }
      }
      return acc;
    }
    case Family::Trig: {
      Complex s = c0 * x;
      for (std::size_t k = 0; k < cos_coeff.size(); ++k) {
        double kw = (k + 1) * omega;
        s += cos_coeff[k] * std::sin(kw * x) / kw;
      }
      for (std::size_t k = 0; k < sin_coeff.size(); ++k) {
        double kw = (k + 1) * omega;
        s += sin_coeff[k] * (1.0 - std::cos(kw * x)) / kw;
      }
      return s;
    }
  }
  return {};
}

std::vector<double> CoeffFunction::breakpoints() const {
  if (family != Family::PiecewiseLinear) return {};
  if (nodes.size() <= 2) return {};
  return std::vector<double>(nodes.begin() + 1, nodes.end() - 1);
}

CoeffFunction CoeffFunction::reflected(double T) const {
  switch (family) {
    case Family::Constant:
      return *this;
    case Family::PiecewiseLinear: {
      std::vector<double> x(nodes.size());
      std::vector<Complex> v(vals.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        x[i] = T - nodes[nodes.size() - 1 - i];
        v[i] = vals[vals.size() - 1 - i];
      }
      x.front() = 0.0;  // squash roundoff at the ends
      x.back() = T;
      return piecewise_linear(std::move(x), std::move(v));
    }
    case Family::Trig: {
      // cos(kw(T-x)) = cos(kwT)cos(kwx) + sin(kwT)sin(kwx)
      // sin(kw(T-x)) = sin(kwT)cos(kwx) - cos(kwT)sin(kwx)
      std::size_t K = std::max(cos_coeff.size(), sin_coeff.size());
      std::vector<Complex> ac(K, Complex{}), bs(K, Complex{});
      for (std::size_t k = 0; k < K; ++k) {
        double kwT = (k + 1) * omega * T;
        Complex a = k < cos_coeff.size() ? cos_coeff[k] : Complex{};
        Complex b = k < sin_coeff.size() ? sin_coeff[k] : Complex{};
        ac[k] = a * std::cos(kwT) + b * std::sin(kwT);
        bs[k] = a * std::sin(kwT) - b * std::cos(kwT);
      }
      return trig(omega, c0, std::move(ac), std::move(bs));
    }
  }
  return {};
}

bool CoeffFunction::is_zero() const {
  auto z = [](Complex c) { return c == Complex{}; };
  switch (family) {
    case Family::Constant:
      return z(value);
    case Family::PiecewiseLinear:
      return std::all_of(vals.begin(), vals.end(), z);
    case Family::Trig:
      return z(c0) && std::all_of(cos_coeff.begin(), cos_coeff.end(), z) &&
             std::all_of(sin_coeff.begin(), sin_coeff.end(), z);
  }
  return false;
}

Coefficients::Coefficients(double T_, CoeffFunction p_, CoeffFunction q_)
    : T(T_), p(std::move(p_)), q(std::move(q_)) {
  if (!(T > 0.0)) throw ConfigError("Coefficients: T must be positive");
}

Coefficients Coefficients::reflected() const {
  return Coefficients(T, p.reflected(T), q.reflected(T));
}

std::vector<double> Coefficients::breakpoints() const {
  std::vector<double> b = p.breakpoints();
  std::vector<double> bq = q.breakpoints();
  b.insert(b.end(), bq.begin(), bq.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::erase_if(b, [this](double x) { return x <= 0.0 || x >= T; });
  return b;
}

Complex evaluate_coeff(const Coefficients& c, Which which, double x) {
  if (x < 0.0 || x > c.T)
    throw std::domain_error("evaluate_coeff: x outside [0, T]");
  return which == Which::p ? c.p.eval(x) : c.q.eval(x);
}

Complex integral_p(const Coefficients& c, double x) {
  if (x < 0.0 || x > c.T)
    throw std::domain_error("integral_p: x outside [0, T]");
  return c.p.integral(x);
}

}  // namespace pencil
