#pragma once

#include <optional>
#include <vector>

#include "pencil/charfns.hpp"

namespace pencil {

/// Sector away from the real axis: arg lambda in [delta, pi - delta].
/// Deviation scans walk a ray inside the sector through increasing radii.
struct SectorSpec {
  double delta = 0.3;
  std::vector<double> radii;  // strictly increasing, positive
  double arg = kPi / 2;

  void validate() const;
};

enum class AsymKind { Y1, Y2, Phi, v1, phi, v2, delta1, delta11 };
std::string to_string(AsymKind k);
AsymKind asym_kind_from_string(const std::string& s);

/// Leading-order model of a solution or characteristic function for large
/// lambda: a prefactor times a single exponential branch, parametrized by
/// H1, T and the running integral of p. This is a formula object, not a
/// computed solution.
struct AsymptoticModel {
  AsymKind kind = AsymKind::delta1;
  Complex H1{1.0, 0.0};
  Coefficients coeffs;

  static AsymptoticModel for_problem(const ProblemSpec& problem, AsymKind kind);
};

/// The leading term without its (1 + o(1)) factor; nu = 0 for the value,
/// nu = 1 for the x-derivative. delta1/delta11 ignore x and nu.
Complex model_value(const AsymptoticModel& m, double x, Complex lambda, int nu);
Scaled model_value_scaled(const AsymptoticModel& m, double x, Complex lambda,
                          int nu);

struct ScanPoint {
  double radius = 0.0;
  double deviation = 0.0;
  bool available = true;      // false when the computed value overflowed
  double remainder = 0.0;     // |exp(i lambda (2x - a))| diagnostic, when on
};

struct DeviationScanOptions {
  int nu = 0;
  bool report_remainder = false;  // adds the window-tail remainder column
  IntegratorOptions ode;
};

/// deviation(r) = |computed(x, r e^{i arg}) / model - 1| along the sector
/// ray, scale-aware. Kinds phi and v2 require the first measure to be
/// constant beyond some a < T.
std::vector<ScanPoint> deviation_scan(const CharEngine& engine, AsymKind kind,
                                      const SectorSpec& sector, double x,
                                      const DeviationScanOptions& opt = {});

struct BoundCheckEntry {
  Complex lambda{0.0, 0.0};
  double ratio = 0.0;
  bool included = true;  // false when filtered out by the root-distance gap
};

struct BoundCheckReport {
  std::vector<BoundCheckEntry> entries;
  double max_ratio = 0.0;
  double bound = 100.0;
  bool passed = true;
  int excluded = 0;
};

/// Checks the upper-half-plane growth envelopes |computed| <= C * envelope
/// for v1, Phi, phi, v2 on the given samples. Samples within min_root_gap
/// of the relevant spectrum (Lambda1 roots for Phi, Lambda11 roots for v2)
/// are excluded. phi requires a constant-tailed first measure and
/// x >= a / 2.
BoundCheckReport bound_check(const CharEngine& engine, AsymKind kind,
                             const std::vector<Complex>& lambda_samples,
                             double min_root_gap,
                             const std::vector<Complex>& lambda1_roots,
                             const std::vector<Complex>& lambda11_roots,
                             double x, double bound_constant = 100.0);

}  // namespace pencil
