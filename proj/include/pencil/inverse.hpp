#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pencil/spectra.hpp"

namespace pencil {

/// Real parameter vector -> coefficient pair, with the integral of p pinned
/// by construction: p = fixed mean + zero-mean trig basis, q = constant +
/// trig basis. Basis order for p: sin(2 pi x/T), cos(2 pi x/T),
/// sin(4 pi x/T), ...; for q: 1, sin(2 pi x/T), cos(2 pi x/T), ...
struct Parametrization {
  double T = kPi;
  int p_dim = 0;
  int q_dim = 0;
  Complex fixed_integral_p{0.0, 0.0};
  // When set, the first p parameter is the mean itself instead of being
  // pinned by fixed_integral_p (demonstration mode; the theorems assume the
  // integral of p known a priori).
  bool free_mean = false;

  int dim() const { return p_dim + q_dim; }
  Coefficients build(const std::vector<double>& params) const;
  void validate() const;
};

enum class DataKind { weyl_and_omega, two_spectra, three_spectra };
std::string to_string(DataKind k);
DataKind data_kind_from_string(const std::string& s);

struct WeylSample {
  Complex lambda{0.0, 0.0};
  Complex M{0.0, 0.0};
  Complex omega{0.0, 0.0};
};

struct InverseData {
  DataKind kind = DataKind::two_spectra;
  std::vector<WeylSample> weyl_samples;                     // weyl_and_omega
  std::vector<Complex> lambda1_targets, lambda11_targets;   // two_spectra
  std::vector<Complex> l0_targets, l1_targets, l2_targets;  // three_spectra

  bool empty() const;
};

struct InverseConfig {
  Parametrization param;
  BoundaryMeasure u1, u2;  // known a priori
  bool strict_mode = true;
  InverseData data;
  std::vector<double> start;
  double damping = 1e-3;
  int max_iter = 60;
  double tol = 1e-9;
  // Per-iteration cap on the step's max-norm; the spectral residuals are
  // oscillatory in the parameters and an unclamped first step can hop into
  // a spurious basin.
  double max_step = 0.35;
  IntegratorOptions ode;
  // Box for the condition-S report at the solution; skipped when unset.
  std::optional<Box> condition_s_box;
  double condition_s_gap = 1e-6;

  ProblemSpec problem_at(const std::vector<double>& params) const;
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double damping = 0.0;
  double residual_norm = 0.0;
  std::vector<double> params;
};

struct InverseResult {
  Coefficients coefficients;
  std::vector<double> params;
  double final_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::optional<ConditionSReport> condition_S;
  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;
};

/// Stacked real residual at the given parameters. weyl_and_omega: Re/Im of
/// M - M_target and omega - omega_target per sample (samples landing on a
/// pole of M are dropped, with a warning). two_spectra: Re/Im of delta1 at
/// the Lambda1 targets and delta11 at the Lambda11 targets (zero iff the
/// targets are eigenvalues). three_spectra: the same with omega, delta1,
/// delta2 under the point measures at 0, a, T.
std::vector<double> inverse_residual(const InverseConfig& config,
                                     const std::vector<double>& params,
                                     std::vector<std::string>* warnings = nullptr);

/// Damped Gauss-Newton on the residual, Jacobian by forward differences.
InverseResult inverse_solve(const InverseConfig& config);

/// Finite symmetric product through the given zeros, normalized so the
/// reduced function (zeros at the origin factored out as lambda^m) takes
/// `normalization` at lambda = 0. Roots are greedily matched into +/- pairs
/// and each pair's factors are multiplied together.
CharFn char_from_zeros(const std::vector<Complex>& roots,
                       Complex normalization);

/// JSON round-trip for inverse run specs and results (CLI surface).
std::string inverse_config_to_json(const InverseConfig& config);
InverseConfig inverse_config_from_json(const std::string& text);
std::string inverse_result_to_json(const InverseResult& result,
                                   const Parametrization& param);

}  // namespace pencil
