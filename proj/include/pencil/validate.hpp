#pragma once

#include <string>
#include <vector>

#include "pencil/charfns.hpp"

namespace pencil {

struct ValidateCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;  // worst case over the grid
  double tol = 0.0;
};

struct ValidateReport {
  std::vector<ValidateCheck> checks;
  bool omega_maybe_identically_zero = false;
  bool all_passed() const;
  const ValidateCheck* find(const std::string& name) const;
};

struct ValidateOptions {
  int n_re = 20;
  int n_im = 10;
  double re0 = -10.0, re1 = 10.0, im0 = -5.0, im1 = 5.0;
  double tol = 1e-7;
  int x_samples = 5;
  bool truncation_identity = true;
  int workers = 1;
  IntegratorOptions ode;
};

/// The redundant-path identity suite on one problem over a lambda grid:
/// determinant-path agreement for omega and the three deltas, the Wronskian
/// identities tying theta/psi/the Weyl solution to phi, the Weyl-function
/// consistency, the unit Wronskian, and the measure-truncation identity at
/// a = T, T/2, T/4. Every check reports its worst deviation.
ValidateReport validate_problem(const ProblemSpec& problem,
                                const ValidateOptions& opt = {});

}  // namespace pencil
