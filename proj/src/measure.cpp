#include "pencil/measure.hpp"

namespace pencil {

BoundaryMeasure BoundaryMeasure::point(double T, double t, Complex w,
                                       int label) {
  BoundaryMeasure m;
  m.T = T;
  m.label = label;
  m.atoms.push_back({t, w});
  m.validate();
  return m;
}

Complex BoundaryMeasure::H() const {
  Complex h{0.0, 0.0};
  for (const auto& a : atoms)
    if (a.t == 0.0) h += a.w;
  return h;
}

double BoundaryMeasure::total_variation() const {
  double tv = 0.0;
  for (const auto& a : atoms) tv += std::abs(a.w);
  if (density.size() >= 2) {
    double h = T / static_cast<double>(density.size() - 1);
    for (std::size_t i = 0; i + 1 < density.size(); ++i)
      tv += 0.5 * h * (std::abs(density[i]) + std::abs(density[i + 1]));
  }
  return tv;
}

double BoundaryMeasure::support_end() const {
  double end = 0.0;
  for (const auto& a : atoms)
    if (a.w != Complex{} && a.t > end) end = a.t;
  if (density.size() >= 2) {
    double h = T / static_cast<double>(density.size() - 1);
    for (std::size_t i = density.size(); i-- > 0;) {
      if (density[i] != Complex{}) {
        end = std::max(end, static_cast<double>(i) * h);
        break;
      }
    }
  }
  return end;
}

void BoundaryMeasure::validate() const {
  if (!(T > 0.0)) throw ConfigError("BoundaryMeasure: T must be positive");
  if (density.size() == 1)
    throw ConfigError("BoundaryMeasure: density needs >= 2 samples");
  for (const auto& a : atoms)
    if (a.t < 0.0 || a.t > T)
      throw std::domain_error("BoundaryMeasure: atom outside [0, T]");
  if (!std::isfinite(total_variation()))
    throw ConfigError("BoundaryMeasure: total variation not finite");
}

BoundaryMeasure truncate_measure(const BoundaryMeasure& m, double a) {
  if (!(a > 0.0) || a > m.T)
    throw std::domain_error("truncate_measure: a outside (0, T]");
  BoundaryMeasure out;
  out.T = m.T;
  out.label = m.label;
  for (const auto& at : m.atoms)
    if (at.t <= a) out.atoms.push_back(at);
  if (!m.density.empty()) {
    out.density = m.density;
    double h = m.T / static_cast<double>(m.density.size() - 1);
    for (std::size_t i = 0; i < out.density.size(); ++i)
      if (static_cast<double>(i) * h > a) out.density[i] = Complex{};
  }
  return out;
}

BoundaryMeasure restrict_measure(const BoundaryMeasure& m, double lo,
                                 double hi) {
  BoundaryMeasure out;
  out.T = m.T;
  out.label = m.label;
  for (const auto& at : m.atoms)
    if (at.t > lo && at.t <= hi) out.atoms.push_back(at);
  if (!m.density.empty()) {
    out.density = m.density;
    double h = m.T / static_cast<double>(m.density.size() - 1);
    for (std::size_t i = 0; i < out.density.size(); ++i) {
      double t = static_cast<double>(i) * h;
      if (!(t > lo && t <= hi)) out.density[i] = Complex{};
    }
  }
  return out;
}

}  // namespace pencil
