#pragma once

#include <string>

#include "pencil/measure.hpp"
#include "pencil/ode.hpp"

namespace pencil {

/// A labeled form evaluation: which functional produced the value.
struct FormValue {
  Complex value{0.0, 0.0};
  std::string label;  // "U1", "U2", "U1_trunc(a)", "V1", "V2"
};

/// The nonlocal form: sum of atom weights times y at the atom locations
/// (off-grid locations by local cubic interpolation of the trace) plus the
/// trapezoid integral of density * y on the trace grid. The trace's
/// scale_log is applied to the returned value.
Complex apply_measure_form(const BoundaryMeasure& m, const SolutionTrace& tr);

/// Same, but keeping the scale factor separate (needed deep in the upper
/// half-plane where the plain value would overflow).
Scaled apply_measure_form_scaled(const BoundaryMeasure& m,
                                 const SolutionTrace& tr);

/// Point forms at the right endpoint: j = 1 gives y(T), j = 2 gives y'(T).
Complex apply_point_form(int j, const SolutionTrace& tr);
Scaled apply_point_form_scaled(int j, const SolutionTrace& tr);

/// Labeled variants.
FormValue measure_form_value(const BoundaryMeasure& m, const SolutionTrace& tr);
FormValue truncated_form_value(const BoundaryMeasure& m, double a,
                               const SolutionTrace& tr);
FormValue point_form_value(int j, const SolutionTrace& tr);

}  // namespace pencil
