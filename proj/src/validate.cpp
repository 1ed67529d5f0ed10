#include "pencil/validate.hpp"

#include <algorithm>
#include <cmath>

#include "pencil/parallel.hpp"

namespace pencil {

bool ValidateReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidateCheck& c) { return c.passed; });
}

const ValidateCheck* ValidateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max({1.0, std::abs(got), std::abs(want)});
}

struct GridWorst {
  double path_d1 = 0, path_d2 = 0, path_d11 = 0;
  double wronsk_theta = 0, wronsk_psi = 0, wronsk_weyl = 0;
  double weyl_consistency = 0;
  double trunc_d1 = 0, trunc_d11 = 0;
  double omega_abs_max = 0;
};

}  // namespace

ValidateReport validate_problem(const ProblemSpec& problem,
                                const ValidateOptions& opt) {
  CharEngine engine(problem, opt.ode);
  const double T = problem.T();

  std::vector<Complex> grid;
  grid.reserve(static_cast<std::size_t>(opt.n_re) * opt.n_im);
  for (int i = 0; i < opt.n_re; ++i)
    for (int j = 0; j < opt.n_im; ++j) {
      double re = opt.re0 + (opt.re1 - opt.re0) *
                                (opt.n_re == 1 ? 0.5 : i / double(opt.n_re - 1));
      double im = opt.im0 + (opt.im1 - opt.im0) *
                                (opt.n_im == 1 ? 0.5 : j / double(opt.n_im - 1));
      grid.push_back({re, im});
    }

  // Deterministic interior sample points for the Wronskian identities,
  // kept in (0, T/10]: the products y y' there grow like exp(2 Im lambda x),
  // and past that the identity is not representable in doubles over the
  // standard lambda box.
  std::vector<double> xs;
  const int N = std::max(opt.ode.grid_n, opt.ode.min_grid_n);
  for (int k = 1; k <= opt.x_samples; ++k) {
    int idx = static_cast<int>(static_cast<long>(N) * k / (10 * (opt.x_samples + 1)));
    xs.push_back(T * std::max(idx, 1) / N);
  }

  std::vector<GridWorst> per(grid.size());
  parallel_for(grid.size(), opt.workers, [&](std::size_t g) {
    Complex z = grid[g];
    GridWorst& w = per[g];

    for (CharName n : {CharName::delta1, CharName::delta2, CharName::delta11}) {
      Complex a = engine.eval(n, z, EvalPath::det_of_X).scaled().value();
      Complex b = engine.eval(n, z, EvalPath::via_Z).scaled().value();
      double e = rel_err(a, b);
      switch (n) {
        case CharName::delta1: w.path_d1 = e; break;
        case CharName::delta2: w.path_d2 = e; break;
        default: w.path_d11 = e; break;
      }
    }

    // det-of-X is the well-conditioned route for omega when the measures
    // have compact support; via_Z cancels exp(2 Im lambda T) there.
    Complex omega = engine.eval(CharName::omega, z, EvalPath::det_of_X)
                        .scaled().value();
    w.omega_abs_max = std::abs(omega);
    Complex d1 = engine.eval(CharName::delta1, z).scaled().value();
    SolutionTrace phi = engine.combined(Solution::phi, z);
    SolutionTrace theta = engine.combined(Solution::theta, z);
    SolutionTrace psi = engine.combined(Solution::psi, z);
    for (double x : xs) {
      w.wronsk_theta = std::max(w.wronsk_theta, rel_err(wronskian(theta, phi, x), omega));
      w.wronsk_psi = std::max(w.wronsk_psi, rel_err(wronskian(psi, phi, x), d1));
    }

    CharEvaluation M = engine.eval(CharName::weylM, z);
    if (!M.at_pole) {
      SolutionTrace weyl = engine.combined(Solution::weyl, z);
      Complex M2 = apply_measure_form(problem.u2, weyl);
      w.weyl_consistency = rel_err(M.value * std::exp(M.scale_log), M2);
      for (double x : xs)
        w.wronsk_weyl =
            std::max(w.wronsk_weyl, rel_err(wronskian(weyl, phi, x), 1.0));
    }

    if (opt.truncation_identity) {
      auto trZ = engine.traces_Z(z);
      for (double a : {T, T / 2, T / 4}) {
        auto [d1a2, d11a2] = engine.truncated_deltas_scaled(a / 2, z);
        auto [d1a, d11a] = engine.truncated_deltas_scaled(a, z);
        BoundaryMeasure window = restrict_measure(problem.u1, a / 2, a);
        Complex q2 = apply_measure_form(window, trZ->second);
        Complex q1 = apply_measure_form(window, trZ->first);
        w.trunc_d1 = std::max(
            w.trunc_d1, rel_err(d1a2.value() - d1a.value(), q2));
        w.trunc_d11 = std::max(
            w.trunc_d11, rel_err(d11a2.value() - d11a.value(), -q1));
      }
    }
  });

  GridWorst worst;
  for (const GridWorst& w : per) {
    worst.path_d1 = std::max(worst.path_d1, w.path_d1);
    worst.path_d2 = std::max(worst.path_d2, w.path_d2);
    worst.path_d11 = std::max(worst.path_d11, w.path_d11);
    worst.wronsk_theta = std::max(worst.wronsk_theta, w.wronsk_theta);
    worst.wronsk_psi = std::max(worst.wronsk_psi, w.wronsk_psi);
    worst.wronsk_weyl = std::max(worst.wronsk_weyl, w.wronsk_weyl);
    worst.weyl_consistency = std::max(worst.weyl_consistency, w.weyl_consistency);
    worst.trunc_d1 = std::max(worst.trunc_d1, w.trunc_d1);
    worst.trunc_d11 = std::max(worst.trunc_d11, w.trunc_d11);
    worst.omega_abs_max = std::max(worst.omega_abs_max, w.omega_abs_max);
  }

  ValidateReport rep;
  auto add = [&](const std::string& name, double measured) {
    rep.checks.push_back({name, measured <= opt.tol, measured, opt.tol});
  };
  add("path_agreement_delta1", worst.path_d1);
  add("path_agreement_delta2", worst.path_d2);
  add("path_agreement_delta11", worst.path_d11);
  add("wronskian_theta_phi_is_omega", worst.wronsk_theta);
  add("wronskian_psi_phi_is_delta1", worst.wronsk_psi);
  add("weyl_matches_U2_of_weyl_solution", worst.weyl_consistency);
  add("unit_wronskian_weyl_phi", worst.wronsk_weyl);
  if (opt.truncation_identity) {
    add("truncation_identity_delta1", worst.trunc_d1);
    add("truncation_identity_delta11", worst.trunc_d11);
  }
  rep.omega_maybe_identically_zero = worst.omega_abs_max < 1e-12;
  return rep;
}

}  // namespace pencil
