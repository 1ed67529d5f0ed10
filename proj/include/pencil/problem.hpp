#pragma once

#include <cstdint>
#include <string>

#include "pencil/coefficients.hpp"
#include "pencil/measure.hpp"

namespace pencil {

/// The full problem data: coefficients (p, q) on [0, T] and the two boundary
/// measures. In strict mode the first form must have a genuine jump at 0
/// (|H1| above a small floor); forward evaluation works either way, the
/// inverse and asymptotic machinery require strict mode.
struct ProblemSpec {
  Coefficients coeffs;
  BoundaryMeasure u1;
  BoundaryMeasure u2;
  bool strict_mode = true;

  static constexpr double kH1Floor = 1e-12;

  ProblemSpec() = default;
  ProblemSpec(Coefficients c, BoundaryMeasure m1, BoundaryMeasure m2,
              bool strict = true);

  double T() const { return coeffs.T; }
  const BoundaryMeasure& form(int j) const { return j == 1 ? u1 : u2; }

  /// Same measures, reflected coefficients p(T-x), q(T-x).
  ProblemSpec reflected() const;

  void validate() const;
};

/// JSON round-trip for problem files. Doubles are written with shortest
/// round-trip precision, so write/read/write is byte-stable.
std::string problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const std::string& text);
void save_problem(const ProblemSpec& p, const std::string& path);
ProblemSpec load_problem(const std::string& path);

/// Deterministic random problem from the supported families:
/// trig p, piecewise-linear q (|coefficients| <= 1), u1 with an atom at 0
/// plus interior atoms and a smooth density, u2 unconstrained.
ProblemSpec make_random_problem(std::uint64_t seed, double T = kPi);

}  // namespace pencil
