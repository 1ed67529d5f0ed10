#include "pencil/asymptotics.hpp"

#include <cmath>

namespace pencil {

void SectorSpec::validate() const {
  if (!(delta > 0.0) || !(delta < kPi / 2))
    throw ConfigError("SectorSpec: delta must lie in (0, pi/2)");
  if (radii.empty()) throw ConfigError("SectorSpec: radii must be non-empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ConfigError("SectorSpec: radii must be positive");
    if (i && !(radii[i] > radii[i - 1]))
      throw ConfigError("SectorSpec: radii must be strictly increasing");
  }
  if (arg < delta || arg > kPi - delta)
    throw ConfigError("SectorSpec: arg must lie in [delta, pi - delta]");
}

std::string to_string(AsymKind k) {
  switch (k) {
    case AsymKind::Y1: return "Y1";
    case AsymKind::Y2: return "Y2";
    case AsymKind::Phi: return "Phi";
    case AsymKind::v1: return "v1";
    case AsymKind::phi: return "phi";
    case AsymKind::v2: return "v2";
    case AsymKind::delta1: return "delta1";
    case AsymKind::delta11: return "delta11";
  }
  return "?";
}

AsymKind asym_kind_from_string(const std::string& s) {
  if (s == "Y1") return AsymKind::Y1;
  if (s == "Y2") return AsymKind::Y2;
  if (s == "Phi") return AsymKind::Phi;
  if (s == "v1") return AsymKind::v1;
  if (s == "phi") return AsymKind::phi;
  if (s == "v2") return AsymKind::v2;
  if (s == "delta1") return AsymKind::delta1;
  if (s == "delta11") return AsymKind::delta11;
  throw ConfigError("unknown asymptotic kind: " + s);
}

AsymptoticModel AsymptoticModel::for_problem(const ProblemSpec& problem,
                                             AsymKind kind) {
  AsymptoticModel m;
  m.kind = kind;
  m.H1 = problem.u1.H();
  m.coeffs = problem.coeffs;
  return m;
}

Scaled model_value_scaled(const AsymptoticModel& m, double x, Complex lambda,
                          int nu) {
  if (lambda == Complex{})
    throw std::domain_error("model_value: lambda must be nonzero");
  const Complex I{0.0, 1.0};
  const double T = m.coeffs.T;
  auto P = [&](double t) { return m.coeffs.p.integral(t); };
  auto pw = [&](Complex base, int k) {  // base^k for k in {-1, 0, 1}
    if (k == 0) return Complex(1.0, 0.0);
    return k == 1 ? base : 1.0 / base;
  };

  Complex pre;      // finite prefactor
  Complex expo;     // full complex exponent
  switch (m.kind) {
    case AsymKind::Y1:
      pre = pw(I * lambda, nu);
      expo = I * (lambda * x - P(x));
      break;
    case AsymKind::Y2:
      pre = pw(-I * lambda, nu);
      expo = -I * (lambda * x - P(x));
      break;
    case AsymKind::Phi:
      pre = pw(I * lambda, nu) / m.H1;
      expo = I * (lambda * x - P(x));
      break;
    case AsymKind::v1:
      pre = pw(I * lambda, nu) * 0.5;
      expo = -I * (lambda * (T - x) - P(T - x));
      break;
    case AsymKind::phi:
      pre = 0.5 * m.H1 * pw(-I * lambda, nu - 1);
      expo = -I * (lambda * x - P(x));
      break;
    case AsymKind::v2:
      pre = pw(-I * lambda, nu - 1);
      expo = I * (lambda * (T - x) - P(T - x));
      break;
    case AsymKind::delta1:
      pre = -m.H1 / (2.0 * I * lambda);
      expo = -I * (lambda * T - P(T));
      break;
    case AsymKind::delta11:
      pre = 0.5 * m.H1;
      expo = -I * (lambda * T - P(T));
      break;
  }
  // exp(expo) = exp(Re expo) * exp(i Im expo); the real part goes to the
  // scale so huge moduli stay representable.
  return Scaled{pre * std::exp(Complex(0.0, expo.imag())), expo.real()};
}

Complex model_value(const AsymptoticModel& m, double x, Complex lambda, int nu) {
  return model_value_scaled(m, x, lambda, nu).value();
}

namespace {

// Smallest a with the first measure constant beyond it; throws when no such
// a < T exists (required by the window-tail asymptotics).
double constant_tail_start(const ProblemSpec& problem) {
  double a = problem.u1.support_end();
  if (a >= problem.T() * (1.0 - 1e-12))
    throw ConfigError(
        "asymptotics: first measure must be constant beyond some a < T");
  return std::max(a, 1e-6 * problem.T());
}

Scaled computed_value(const CharEngine& engine, AsymKind kind, double x,
                      Complex lambda, int nu) {
  switch (kind) {
    case AsymKind::delta1:
      return engine.eval(CharName::delta1, lambda).scaled();
    case AsymKind::delta11:
      return engine.eval(CharName::delta11, lambda).scaled();
    case AsymKind::Phi:
    case AsymKind::v1:
    case AsymKind::phi:
    case AsymKind::v2: {
      Solution s = kind == AsymKind::Phi  ? Solution::weyl
                   : kind == AsymKind::v1 ? Solution::v1
                   : kind == AsymKind::phi ? Solution::phi
                                            : Solution::v2;
      SolutionTrace tr = engine.combined(s, lambda);
      Complex v = nu == 0 ? tr.value_at(x) : tr.deriv_at(x);
      return Scaled{v, tr.scale_log};
    }
    case AsymKind::Y1:
    case AsymKind::Y2:
      throw ConfigError("deviation_scan: Y1/Y2 are model-only kinds");
  }
  throw std::logic_error("computed_value");
}

}  // namespace

std::vector<ScanPoint> deviation_scan(const CharEngine& engine, AsymKind kind,
                                      const SectorSpec& sector, double x,
                                      const DeviationScanOptions& opt) {
  sector.validate();
  const ProblemSpec& problem = engine.problem();
  if (!problem.strict_mode)
    throw ConfigError("deviation_scan: strict mode required");
  double a = 0.0;
  if (kind == AsymKind::phi || kind == AsymKind::v2)
    a = constant_tail_start(problem);
  AsymptoticModel model = AsymptoticModel::for_problem(problem, kind);

  std::vector<ScanPoint> out;
  out.reserve(sector.radii.size());
  for (double r : sector.radii) {
    Complex lambda = r * Complex(std::cos(sector.arg), std::sin(sector.arg));
    ScanPoint pt;
    pt.radius = r;
    if (opt.report_remainder && a > 0.0) {
      Complex tail = Complex(0, 1) * lambda * (2.0 * x - a);
      pt.remainder = std::exp(std::min(700.0, tail.real()));
    }
    try {
      Scaled got = computed_value(engine, kind, x, lambda, opt.nu);
      Scaled want = model_value_scaled(model, x, lambda, opt.nu);
      Scaled ratio = got / want;
      if (!std::isfinite(ratio.log_abs()) || ratio.log_abs() > 700.0) {
        pt.available = false;
      } else {
        pt.deviation = std::abs(ratio.value() - 1.0);
      }
    } catch (const IntegrationError&) {
      pt.available = false;
    } catch (const PoleError&) {
      pt.available = false;
    }
    out.push_back(pt);
  }
  return out;
}

BoundCheckReport bound_check(const CharEngine& engine, AsymKind kind,
                             const std::vector<Complex>& lambda_samples,
                             double min_root_gap,
                             const std::vector<Complex>& lambda1_roots,
                             const std::vector<Complex>& lambda11_roots,
                             double x, double bound_constant) {
  if (kind != AsymKind::v1 && kind != AsymKind::Phi && kind != AsymKind::phi &&
      kind != AsymKind::v2)
    throw ConfigError("bound_check: kind must be one of v1, Phi, phi, v2");
  const ProblemSpec& problem = engine.problem();
  if (kind == AsymKind::phi) {
    double a = constant_tail_start(problem);
    if (x < 0.5 * a)
      throw std::domain_error("bound_check: phi estimate needs x >= a/2");
  }
  const std::vector<Complex>* filter = nullptr;
  if (kind == AsymKind::Phi) filter = &lambda1_roots;
  if (kind == AsymKind::v2) filter = &lambda11_roots;

  AsymptoticModel model = AsymptoticModel::for_problem(problem, kind);
  // The envelope drops the model's bounded prefactors (H1/2 and the like);
  // the allowed constant absorbs them.
  BoundCheckReport rep;
  rep.bound = bound_constant;
  for (Complex lambda : lambda_samples) {
    if (lambda.imag() < 0.0)
      throw std::domain_error("bound_check: samples must lie in the upper half-plane");
    BoundCheckEntry e;
    e.lambda = lambda;
    if (filter) {
      for (Complex r : *filter)
        if (std::abs(lambda - r) < min_root_gap) {
          e.included = false;
          break;
        }
    }
    if (!e.included) {
      ++rep.excluded;
      rep.entries.push_back(e);
      continue;
    }
    double max_over_nu = 0.0;
    for (int nu = 0; nu <= 1; ++nu) {
      Scaled got = computed_value(engine, kind, x, lambda, nu);
      double envelope_log;
      double ll = std::log(std::abs(lambda));
      Complex I{0.0, 1.0};
      auto P = [&](double t) { return problem.coeffs.p.integral(t); };
      double T = problem.T();
      switch (kind) {
        case AsymKind::v1:
          envelope_log = nu * ll + (-I * (lambda * (T - x) - P(T - x))).real();
          break;
        case AsymKind::Phi:
          envelope_log = nu * ll + (I * (lambda * x - P(x))).real();
          break;
        case AsymKind::phi:
          envelope_log = (nu - 1) * ll + (-I * (lambda * x - P(x))).real();
          break;
        default:  // v2
          envelope_log = (nu - 1) * ll + (I * (lambda * (T - x) - P(T - x))).real();
          break;
      }
      double ratio = std::exp(std::min(700.0, got.log_abs() - envelope_log));
      max_over_nu = std::max(max_over_nu, ratio);
    }
    e.ratio = max_over_nu;
    rep.max_ratio = std::max(rep.max_ratio, e.ratio);
    rep.entries.push_back(e);
  }
  rep.passed = rep.max_ratio <= bound_constant;
  return rep;
}

}  // namespace pencil
