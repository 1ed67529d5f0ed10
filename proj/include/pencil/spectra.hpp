#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pencil/charfns.hpp"

namespace pencil {

struct Box {
  double re0 = 0, re1 = 0, im0 = 0, im1 = 0;

  Complex center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  double diag() const { return std::hypot(width(), height()); }
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re0 - slack && z.real() <= re1 + slack &&
           z.imag() >= im0 - slack && z.imag() <= im1 + slack;
  }
  void validate() const {
    if (!(re1 > re0) || !(im1 > im0))
      throw ConfigError("Box: degenerate rectangle");
  }
};

using CharFn = std::function<Complex(Complex)>;

enum class SpectrumName { Xi, Lambda1, Lambda2, Lambda11, L0p, L1p, L2p };
std::string to_string(SpectrumName n);
SpectrumName spectrum_name_from_string(const std::string& s);

struct RootRecord {
  Complex lambda{0.0, 0.0};
  int multiplicity = 1;
  double residual = 0.0;
  bool converged = true;
};

struct Spectrum {
  std::string name;
  Box box;
  std::vector<RootRecord> roots;  // sorted by (Re, Im)
  double residual_max = 0.0;

  int total_multiplicity() const;
  std::vector<Complex> points() const;  // one entry per root (not repeated)
  bool all_converged() const;
};

struct ZeroSearchOptions {
  double tol = 1e-11;            // |f| stopping level, times the local scale
  double phase_step = kPi / 4;   // max phase advance between boundary samples
  // Relative |f| floor on the boundary. Must sit above the evaluation
  // noise of f (~1e-10 of its local scale), or a zero lying exactly on an
  // edge slips through as a puddle of noise and corrupts the winding.
  double boundary_floor = 1e-9;
  int max_perturb = 5;
  int max_newton = 100;
  long max_evals_per_edge = 40000;
  // Initial boundary samples per unit edge length. Must outrun the phase
  // rate of f (about T per unit for the characteristic functions), or a
  // full winding can alias away between samples.
  double samples_per_unit = 8.0;
};

/// Number of zeros of f inside the rectangle, counted with multiplicity:
/// the winding number of f over the boundary, by adaptive phase-tracking
/// quadrature. Perturbs the box (outward, up to max_perturb times) when a
/// boundary sample falls under the floor; the box actually used is written
/// back through used_box when given.
int count_zeros(const CharFn& f, Box box, const ZeroSearchOptions& opt = {},
                Box* used_box = nullptr);

/// Locate all zeros in the box: recursive quadrisection until every sub-box
/// holds at most one zero cluster, then Newton with central-difference
/// derivative. Cluster multiplicity is the winding count of the isolating
/// sub-box, so multiplicities always sum to the box count.
Spectrum find_zeros(const CharFn& f, Box box, const ZeroSearchOptions& opt = {},
                    const std::string& name = "");

enum class ConditionSResult { holds, fails, undecided };
std::string to_string(ConditionSResult r);

struct ConditionSReport {
  ConditionSResult result = ConditionSResult::undecided;
  double min_gap = 0.0;
  Complex pair_a{0.0, 0.0};  // closest pair (when spectra are non-empty)
  Complex pair_b{0.0, 0.0};
};

/// Disjointness of two spectra computed over the same box: fails when some
/// pair comes within `gap`, holds when every pair is separated by more than
/// 10 * gap, undecided in between.
ConditionSReport check_condition_S(const Spectrum& a, const Spectrum& b,
                                   double gap);

/// First-order root locations from the leading asymptotics, used to size
/// search boxes. Supports the Dirichlet-type spectra (Lambda1/L1p) and
/// Lambda11. Requires strict mode.
std::vector<Complex> seed_guesses(const ProblemSpec& problem, SpectrumName name,
                                  int n_lo, int n_hi);

/// Characteristic function of the named spectrum as a callable, evaluated
/// through the engine (via_Z path).
CharFn spectrum_char_fn(const CharEngine& engine, SpectrumName name);

/// Convenience: find the named spectrum of a problem in a box.
Spectrum find_spectrum(const CharEngine& engine, SpectrumName name, Box box,
                       const ZeroSearchOptions& opt = {});

}  // namespace pencil
