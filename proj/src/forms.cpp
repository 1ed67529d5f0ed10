#include "pencil/forms.hpp"

namespace pencil {

Scaled apply_measure_form_scaled(const BoundaryMeasure& m,
                                 const SolutionTrace& tr) {
  if (m.T > tr.T * (1.0 + 1e-12))
    throw std::domain_error("apply_measure_form: trace grid does not cover [0, T]");
  Complex acc{0.0, 0.0};
  for (const auto& a : m.atoms) {
    if (a.t < 0.0 || a.t > tr.T)
      throw std::domain_error("apply_measure_form: atom outside grid range");
    acc += a.w * tr.value_at(a.t);
  }
  if (m.density.size() >= 2) {
    // Trapezoid over the measure's own sample grid, with the trace
    // interpolated to the sample points. The rule is fixed by the measure,
    // so form values do not drift when the trace grid is refined, and the
    // result stays linear in the density samples (the truncation identity
    // is then exact on the samples).
    const std::size_t G = m.density.size();
    const double hd = m.T / static_cast<double>(G - 1);
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < G; ++i) {
      if (m.density[i] == Complex{}) continue;
      double w = (i == 0 || i + 1 == G) ? 0.5 : 1.0;
      sum += w * m.density[i] * tr.value_at(static_cast<double>(i) * hd);
    }
    acc += hd * sum;
  }
  return Scaled{acc, tr.scale_log};
}

Complex apply_measure_form(const BoundaryMeasure& m, const SolutionTrace& tr) {
  return apply_measure_form_scaled(m, tr).value();
}

Scaled apply_point_form_scaled(int j, const SolutionTrace& tr) {
  if (j != 1 && j != 2)
    throw std::invalid_argument("apply_point_form: j must be 1 or 2");
  return Scaled{j == 1 ? tr.y.back() : tr.yp.back(), tr.scale_log};
}

Complex apply_point_form(int j, const SolutionTrace& tr) {
  return apply_point_form_scaled(j, tr).value();
}

FormValue measure_form_value(const BoundaryMeasure& m, const SolutionTrace& tr) {
  return {apply_measure_form(m, tr), "U" + std::to_string(m.label)};
}

FormValue truncated_form_value(const BoundaryMeasure& m, double a,
                               const SolutionTrace& tr) {
  return {apply_measure_form(truncate_measure(m, a), tr),
          "U" + std::to_string(m.label) + "_trunc(" + std::to_string(a) + ")"};
}

FormValue point_form_value(int j, const SolutionTrace& tr) {
  return {apply_point_form(j, tr), "V" + std::to_string(j)};
}

}  // namespace pencil
