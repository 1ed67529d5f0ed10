#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "pencil/forms.hpp"
#include "pencil/problem.hpp"

namespace pencil {

enum class CharName { omega, delta1, delta2, delta11, weylM, bigN };
enum class EvalPath { det_of_X, via_Z, ratio };

/// Named combined solutions: phi is annihilated by U1, theta by U2, psi
/// vanishes at T; weyl is the U1-normalized solution (U1 = 1, value 0 at T);
/// v1, v2 are the right-anchored pair with v2 annihilated by U1.
enum class Solution { phi, theta, psi, weyl, v1, v2 };

struct CharEvaluation {
  Complex lambda{0.0, 0.0};
  CharName name = CharName::omega;
  Complex value{0.0, 0.0};
  EvalPath path = EvalPath::via_Z;
  double scale_log = 0.0;  // true value = value * exp(scale_log)
  bool at_pole = false;

  Scaled scaled() const { return {value, scale_log}; }
};

std::string to_string(CharName n);
std::string to_string(EvalPath p);
CharName char_name_from_string(const std::string& s);
EvalPath eval_path_from_string(const std::string& s);

/// Evaluation workspace for one problem: memoizes the fundamental solution
/// traces per lambda (thread-safe, semantically invisible).
class CharEngine {
 public:
  explicit CharEngine(ProblemSpec problem, IntegratorOptions opt = {});

  const ProblemSpec& problem() const { return problem_; }
  const IntegratorOptions& options() const { return opt_; }

  struct TracePair {
    SolutionTrace first, second;
  };
  /// Left-anchored pair (X1, X2) and right-anchored pair (Z1, Z2), memoized
  /// separately so that single-path evaluations integrate only what they use.
  std::shared_ptr<const TracePair> traces_X(Complex lambda) const;
  std::shared_ptr<const TracePair> traces_Z(Complex lambda) const;

  /// Characteristic function value. The two determinant paths are redundant
  /// on purpose: det_of_X builds 2x2 determinants of form values on X1, X2;
  /// via_Z uses the equivalent single-form expressions on Z1, Z2. Ratios
  /// (weylM = delta2/delta1, bigN = delta1/delta11) flag a pole when the
  /// denominator falls under the floor.
  CharEvaluation eval(CharName name, Complex lambda,
                      EvalPath path = EvalPath::via_Z) const;

  /// Combined solution traces; verifies the defining conditions to 1e-8
  /// after construction. Throws PoleError for weyl/v2 at a pole.
  SolutionTrace combined(Solution which, Complex lambda) const;

  /// (delta1^a, delta11^a) through the measure truncated to [0, a].
  std::pair<Scaled, Scaled> truncated_deltas_scaled(double a,
                                                    Complex lambda) const;
  std::pair<Complex, Complex> truncated_deltas(double a, Complex lambda) const;

  void clear_memo() const;

  static constexpr double kPoleFloor = 1e-12;

 private:
  using TraceMap =
      std::map<std::pair<double, double>, std::shared_ptr<const TracePair>>;
  std::shared_ptr<const TracePair> traces_cached(Complex lambda, TraceMap& map,
                                                 FromEnd end) const;

  ProblemSpec problem_;
  IntegratorOptions opt_;
  mutable std::mutex mu_;
  mutable TraceMap memo_X_;
  mutable TraceMap memo_Z_;
};

/// One-shot wrappers around a temporary engine.
CharEvaluation eval_char(const ProblemSpec& problem, CharName name,
                         Complex lambda, EvalPath path = EvalPath::via_Z,
                         const IntegratorOptions& opt = {});
SolutionTrace build_combined(const ProblemSpec& problem, Solution which,
                             Complex lambda, const IntegratorOptions& opt = {});
std::pair<Complex, Complex> truncated_deltas(const ProblemSpec& problem,
                                             double a, Complex lambda,
                                             const IntegratorOptions& opt = {});

}  // namespace pencil
