#pragma once

#include <vector>

#include "pencil/numeric.hpp"

namespace pencil {

struct Atom {
  double t = 0.0;
  Complex w{0.0, 0.0};
};

/// A complex Stieltjes measure on [0, T]: a finite list of atoms plus an
/// absolutely continuous part given by density samples on a uniform grid
/// over [0, T] (empty = no density). `label` records which boundary form
/// (1 or 2) the measure drives.
struct BoundaryMeasure {
  std::vector<Atom> atoms;
  std::vector<Complex> density;  // samples at t_i = i*T/(G-1), i = 0..G-1
  double T = kPi;
  int label = 1;

  static BoundaryMeasure point(double T, double t, Complex w, int label = 1);

  /// Weight of the atom at t = 0 (zero if absent). This is the jump H of
  /// the measure's distribution function at the left endpoint.
  Complex H() const;

  /// Sum of |atom weights| plus the trapezoid mass of |density|.
  double total_variation() const;

  /// Largest location carrying mass (atoms with nonzero weight, or the last
  /// nonzero density sample); 0 if only the atom at 0 is present.
  double support_end() const;

  void validate() const;
};

/// Restriction to [0, a]: atoms with location <= a are kept, density samples
/// beyond a are zeroed. H is preserved for every a > 0.
BoundaryMeasure truncate_measure(const BoundaryMeasure& m, double a);

/// Restriction to the half-open window (lo, hi]: atoms with lo < t <= hi,
/// density samples elsewhere zeroed.
BoundaryMeasure restrict_measure(const BoundaryMeasure& m, double lo,
                                 double hi);

}  // namespace pencil
