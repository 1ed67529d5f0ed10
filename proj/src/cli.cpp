#include "pencil/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pencil/asymptotics.hpp"
#include "pencil/csvio.hpp"
#include "pencil/experiments.hpp"
#include "pencil/parallel.hpp"
#include "pencil/validate.hpp"

namespace pencil {

namespace {

// All numeric defaults live here; environment variables override them and
// command-line flags override both (documented in --help).
struct Defaults {
  int grid_n = 1024;
  double rtol = 1e-10;
  double atol = 1e-10;
  double zero_tol = 1e-11;
  int workers = default_workers();
  std::uint64_t seed = 1;

  static double env_num(const char* name, double fallback) {
    const char* v = std::getenv(name);
    return v ? std::atof(v) : fallback;
  }
  static Defaults load() {
    Defaults d;
    d.grid_n = static_cast<int>(env_num("PENCIL_GRID_N", d.grid_n));
    d.rtol = env_num("PENCIL_RTOL", d.rtol);
    d.atol = env_num("PENCIL_ATOL", d.atol);
    d.zero_tol = env_num("PENCIL_ZERO_TOL", d.zero_tol);
    d.workers = static_cast<int>(env_num("PENCIL_WORKERS", d.workers));
    d.seed = static_cast<std::uint64_t>(env_num("PENCIL_SEED", 1));
    return d;
  }
};

ProblemSpec free_problem() {
  Coefficients c(kPi, CoeffFunction::constant(0.0), CoeffFunction::constant(0.0));
  BoundaryMeasure u1 = BoundaryMeasure::point(kPi, 0.0, 1.0, 1);
  // The second form sits at T/4: nontrivial, and compactly supported so the
  // redundant determinant routes stay representable over the default grid.
  BoundaryMeasure u2 = BoundaryMeasure::point(kPi, kPi / 4, 1.0, 2);
  return ProblemSpec(std::move(c), std::move(u1), std::move(u2), true);
}

std::string out_path(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  std::filesystem::create_directories(dir);
  return dir + "/" + file;
}

struct Common {
  std::string problem_path;
  std::string out_dir;
  int grid_n;
  double rtol, atol;
  int workers;
  std::uint64_t seed;

  ProblemSpec load() const {
    return problem_path.empty() ? free_problem() : load_problem(problem_path);
  }
  IntegratorOptions ode() const {
    IntegratorOptions o;
    o.grid_n = grid_n;
    o.rtol = rtol;
    o.atol = atol;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c, const Defaults& d) {
  c.grid_n = d.grid_n;
  c.rtol = d.rtol;
  c.atol = d.atol;
  c.workers = d.workers;
  c.seed = d.seed;
  cmd->add_option("--problem", c.problem_path,
                  "problem JSON file (default: free problem, p=q=0, T=pi)");
  cmd->add_option("--out", c.out_dir, "output directory for CSV/JSON artifacts");
  cmd->add_option("--grid-n", c.grid_n, "trace grid size (env PENCIL_GRID_N)");
  cmd->add_option("--rtol", c.rtol, "integrator relative tolerance (env PENCIL_RTOL)");
  cmd->add_option("--atol", c.atol, "integrator absolute tolerance (env PENCIL_ATOL)");
  cmd->add_option("--workers", c.workers,
                  "worker threads; 1 forces sequential order (env PENCIL_WORKERS)");
  cmd->add_option("--seed", c.seed, "seed for seeded scans (env PENCIL_SEED)");
}

struct GridSpec {
  double re0 = -10, re1 = 10, im0 = -5, im1 = 5;
  int n_re = 40, n_im = 20;

  std::vector<Complex> points() const {
    std::vector<Complex> g;
    for (int i = 0; i < n_re; ++i)
      for (int j = 0; j < n_im; ++j)
        g.push_back({re0 + (re1 - re0) * (n_re == 1 ? 0.5 : i / double(n_re - 1)),
                     im0 + (im1 - im0) * (n_im == 1 ? 0.5 : j / double(n_im - 1))});
    return g;
  }
};

void add_grid(CLI::App* cmd, GridSpec& g) {
  cmd->add_option("--re", g.re0, "grid start, real axis")->expected(1);
  cmd->add_option("--re-end", g.re1, "grid stop, real axis");
  cmd->add_option("--nre", g.n_re, "grid count, real axis");
  cmd->add_option("--im", g.im0, "grid start, imaginary axis");
  cmd->add_option("--im-end", g.im1, "grid stop, imaginary axis");
  cmd->add_option("--nim", g.n_im, "grid count, imaginary axis");
}

void dump_traces(const Common& c, const CharEngine& engine, Complex lambda) {
  auto X = engine.traces_X(lambda);
  auto Z = engine.traces_Z(lambda);
  const SolutionTrace* traces[4] = {&X->first, &X->second, &Z->first, &Z->second};
  const char* names[4] = {"X1", "X2", "Z1", "Z2"};
  for (int k = 0; k < 4; ++k) {
    const SolutionTrace& tr = *traces[k];
    CsvWriter csv(out_path(c.out_dir, std::string("trace_") + names[k] + ".csv"),
                  {"x", "re_y", "im_y", "re_yp", "im_yp"});
    double f = std::exp(tr.scale_log);
    for (int i = 0; i <= tr.n(); ++i)
      csv.row({fmt_double(tr.x_at(i)), fmt_double(f * tr.y[i].real()),
               fmt_double(f * tr.y[i].imag()), fmt_double(f * tr.yp[i].real()),
               fmt_double(f * tr.yp[i].imag())});
  }
}

int run_scan(const Common& c, const GridSpec& g, const std::string& fn,
             const std::string& path_name, const std::vector<double>& dump_at) {
  ProblemSpec problem = c.load();
  CharEngine engine(problem, c.ode());
  if (dump_at.size() == 2)
    dump_traces(c, engine, Complex(dump_at[0], dump_at[1]));
  CharName name = char_name_from_string(fn);
  EvalPath path = eval_path_from_string(path_name);
  std::vector<Complex> pts = g.points();
  std::vector<CharEvaluation> vals(pts.size());
  parallel_for(pts.size(), c.workers,
               [&](std::size_t i) { vals[i] = engine.eval(name, pts[i], path); });
  CsvWriter csv(out_path(c.out_dir, "scan.csv"),
                {"re_lambda", "im_lambda", "re_value", "im_value", "name", "path"});
  bool all_tiny = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Complex v = vals[i].value * std::exp(vals[i].scale_log);
    if (std::abs(v) >= 1e-12) all_tiny = false;
    csv.row({fmt_double(pts[i].real()), fmt_double(pts[i].imag()),
             fmt_double(v.real()), fmt_double(v.imag()), fn, path_name});
  }
  if (all_tiny && name == CharName::omega)
    std::cerr << "warning: omega is below 1e-12 on the whole scan grid; "
                 "it may vanish identically\n";
  return 0;
}

int run_spectrum(const Common& c, const std::string& fn,
                 const std::vector<double>& box_v, double tol) {
  ProblemSpec problem = c.load();
  CharEngine engine(problem, c.ode());
  Box box{box_v[0], box_v[1], box_v[2], box_v[3]};
  ZeroSearchOptions zopt;
  zopt.tol = tol;
  zopt.samples_per_unit = std::max(8.0, 2.5 * problem.T());
  CharName name = char_name_from_string(fn);
  Spectrum s = find_zeros(
      [&](Complex z) { return engine.eval(name, z).value; }, box, zopt, fn);
  CsvWriter csv(out_path(c.out_dir, "spectrum.csv"),
                {"name", "re_lambda", "im_lambda", "multiplicity", "residual"});
  for (const auto& r : s.roots)
    csv.row({fn, fmt_double(r.lambda.real()), fmt_double(r.lambda.imag()),
             std::to_string(r.multiplicity), fmt_double(r.residual)});
  return s.all_converged() ? 0 : 1;
}

int run_weyl(const Common& c, const GridSpec& g) {
  ProblemSpec problem = c.load();
  CharEngine engine(problem, c.ode());
  std::vector<Complex> pts = g.points();
  std::vector<std::pair<CharEvaluation, CharEvaluation>> vals(pts.size());
  parallel_for(pts.size(), c.workers, [&](std::size_t i) {
    vals[i] = {engine.eval(CharName::weylM, pts[i]),
               engine.eval(CharName::bigN, pts[i])};
  });
  CsvWriter csv(out_path(c.out_dir, "weyl.csv"),
                {"re_lambda", "im_lambda", "re_M", "im_M", "M_pole", "re_N",
                 "im_N", "N_pole"});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto [m, n] = vals[i];
    Complex mv = m.at_pole ? Complex{} : m.value * std::exp(m.scale_log);
    Complex nv = n.at_pole ? Complex{} : n.value * std::exp(n.scale_log);
    csv.row({fmt_double(pts[i].real()), fmt_double(pts[i].imag()),
             fmt_double(mv.real()), fmt_double(mv.imag()),
             std::to_string(m.at_pole ? 1 : 0), fmt_double(nv.real()),
             fmt_double(nv.imag()), std::to_string(n.at_pole ? 1 : 0)});
  }
  return 0;
}

int run_asym(const Common& c, const std::string& kind_s,
             std::vector<double> radii, std::vector<double> args, double x,
             double delta) {
  ProblemSpec problem = c.load();
  CharEngine engine(problem, c.ode());
  AsymKind kind = asym_kind_from_string(kind_s);
  if (radii.empty()) radii = {5, 10, 20, 40};
  if (args.empty()) args = {delta, kPi / 2, kPi - delta};
  CsvWriter csv(out_path(c.out_dir, "asym.csv"),
                {"kind", "arg", "radius", "deviation"});
  for (double a : args) {
    SectorSpec sector{delta, radii, a};
    DeviationScanOptions dopt;
    dopt.ode = c.ode();
    for (const ScanPoint& pt : deviation_scan(engine, kind, sector, x, dopt))
      csv.row({kind_s, fmt_double(a), fmt_double(pt.radius),
               pt.available ? fmt_double(pt.deviation) : "nan"});
  }
  return 0;
}

int run_inverse(const Common& c, const std::string& spec_path) {
  std::ifstream f(spec_path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + spec_path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  InverseConfig cfg = inverse_config_from_json(text);
  cfg.ode = c.ode();
  InverseResult res = inverse_solve(cfg);

  std::ofstream out(out_path(c.out_dir, "inverse_result.json"), std::ios::binary);
  out << inverse_result_to_json(res, cfg.param) << '\n';
  CsvWriter csv(out_path(c.out_dir, "inverse_iters.csv"),
                {"iter", "damping", "residual_norm", "params"});
  for (const auto& it : res.trace) {
    std::string ps;
    for (std::size_t k = 0; k < it.params.size(); ++k) {
      if (k) ps += ';';
      ps += fmt_double(it.params[k]);
    }
    csv.row({std::to_string(it.iter), fmt_double(it.damping),
             fmt_double(it.residual_norm), ps});
  }
  std::cout << res.message << "; final residual " << res.final_residual << "\n";
  return res.converged ? 0 : 1;
}

int run_scenario(const Common& c, const std::string& which, double alpha,
                 double alpha0, double a) {
  ScenarioOptions sopt;
  sopt.out_dir = c.out_dir;
  sopt.ode = c.ode();
  ScenarioReport rep;
  if (which == "example1") {
    rep = run_example1(example1_default_coeffs(), sopt);
  } else if (which == "example2") {
    rep = run_example2(alpha, alpha0, example2_default_coeffs(alpha0), sopt);
  } else if (which == "three_spectra") {
    Parametrization param;
    param.T = kPi;
    param.p_dim = 1;
    param.q_dim = 1;
    param.fixed_integral_p = Complex(0.3 * kPi, 0.0);
    ThreeSpectraOptions topt;
    topt.base = sopt;
    topt.start_perturbation = {0.1, 0.1};
    rep = run_three_spectra(a, param, {0.12, 0.08}, topt);
  } else {
    throw ConfigError("unknown scenario: " + which);
  }
  for (const auto& ck : rep.checks)
    std::cout << (ck.passed ? "[PASS] " : "[FAIL] ") << rep.scenario << "."
              << ck.name << " measured=" << ck.measured << "\n";
  if (rep.aborted)
    std::cout << "[ABORT] " << rep.scenario << ": " << rep.abort_reason
              << " at lambda=(" << rep.abort_lambda.real() << ", "
              << rep.abort_lambda.imag() << ")\n";
  if (c.out_dir.empty()) std::cout << report_to_json(rep) << "\n";
  return rep.all_passed() ? 0 : 1;
}

int run_validate(const Common& c, int n_re, int n_im, double tol) {
  ProblemSpec problem = c.load();
  ValidateOptions vopt;
  vopt.n_re = n_re;
  vopt.n_im = n_im;
  vopt.tol = tol;
  vopt.workers = c.workers;
  vopt.ode = c.ode();
  // The identity suite needs a little headroom under its 1e-7 budget; the
  // scan defaults stay at the library defaults.
  vopt.ode.rtol = std::min(vopt.ode.rtol, 1e-11);
  vopt.ode.atol = std::min(vopt.ode.atol, 1e-11);
  vopt.ode.grid_n = std::max(vopt.ode.grid_n, 2048);
  ValidateReport rep = validate_problem(problem, vopt);
  CsvWriter csv(out_path(c.out_dir, "validate.csv"),
                {"check", "passed", "measured", "tol"});
  for (const auto& ck : rep.checks) {
    std::cout << (ck.passed ? "[PASS] " : "[FAIL] ") << ck.name
              << " measured=" << ck.measured << " tol=" << ck.tol << "\n";
    csv.row({ck.name, std::to_string(ck.passed ? 1 : 0), fmt_double(ck.measured),
             fmt_double(ck.tol)});
  }
  if (rep.omega_maybe_identically_zero)
    std::cerr << "warning: omega is below 1e-12 on the whole grid; it may "
                 "vanish identically\n";
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  Defaults defaults = Defaults::load();
  CLI::App app{
      "pencilspec: forward and inverse spectral computations for "
      "second-order pencils with nonlocal Stieltjes boundary forms"};
  app.require_subcommand(1);

  Common c_scan, c_spec, c_weyl, c_asym, c_inv, c_scen, c_val;
  GridSpec g_scan, g_weyl;
  std::string scan_fn = "delta1", scan_path = "via_Z";
  std::vector<double> scan_dump;
  std::vector<double> spec_box{0.5, 3.5, -1.0, 1.0};
  std::string spec_fn = "delta1";
  double spec_tol = defaults.zero_tol;
  std::string asym_kind = "delta1";
  std::vector<double> asym_radii, asym_args;
  double asym_x = 0.0, asym_delta = 0.3;
  std::string inv_spec;
  std::string scen_name;
  double scen_alpha = kPi / 4, scen_alpha0 = kPi / 3, scen_a = kPi / 2;
  int val_nre = 20, val_nim = 10;
  double val_tol = 1e-7;

  CLI::App* scan = app.add_subcommand("scan", "characteristic function over a lambda grid");
  add_common(scan, c_scan, defaults);
  add_grid(scan, g_scan);
  scan->add_option("--fn", scan_fn, "omega|delta1|delta2|delta11");
  scan->add_option("--path", scan_path, "det_of_X|via_Z");
  scan->add_option("--dump-trace", scan_dump,
                   "also export the fundamental traces at this lambda (re im)")
      ->expected(2);

  CLI::App* spec = app.add_subcommand("spectrum", "locate zeros in a box");
  add_common(spec, c_spec, defaults);
  spec->add_option("--fn", spec_fn, "omega|delta1|delta2|delta11");
  spec->add_option("--box", spec_box, "re0 re1 im0 im1")->expected(4);
  spec->add_option("--tol", spec_tol, "zero residual tolerance");

  CLI::App* weyl = app.add_subcommand("weyl", "Weyl-type functions M and N over a grid");
  add_common(weyl, c_weyl, defaults);
  add_grid(weyl, g_weyl);

  CLI::App* asym = app.add_subcommand("asym", "asymptotic deviation scans");
  add_common(asym, c_asym, defaults);
  asym->add_option("--kind", asym_kind, "Phi|v1|phi|v2|delta1|delta11");
  asym->add_option("--radii", asym_radii, "ray radii (default 5 10 20 40)");
  asym->add_option("--args", asym_args, "ray angles (default delta, pi/2, pi-delta)");
  asym->add_option("--x", asym_x, "evaluation point for solution kinds");
  asym->add_option("--delta", asym_delta, "sector half-angle");

  CLI::App* inv = app.add_subcommand("inverse", "run an inverse solve from a spec file");
  add_common(inv, c_inv, defaults);
  inv->add_option("--spec", inv_spec, "inverse run spec JSON")->required();

  CLI::App* scen = app.add_subcommand("scenario", "scripted end-to-end scenarios");
  add_common(scen, c_scen, defaults);
  scen->add_option("name", scen_name, "example1|example2|three_spectra")->required();
  scen->add_option("--alpha", scen_alpha, "window size for example2");
  scen->add_option("--alpha0", scen_alpha0, "flat margin for example2");
  scen->add_option("--a", scen_a, "interior point for three_spectra");

  CLI::App* val = app.add_subcommand("validate", "identity/invariant suite on a problem");
  add_common(val, c_val, defaults);
  val->add_option("--nre", val_nre, "lambda grid count, real axis");
  val->add_option("--nim", val_nim, "lambda grid count, imaginary axis");
  val->add_option("--tol", val_tol, "relative tolerance for the identities");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (scan->parsed()) return run_scan(c_scan, g_scan, scan_fn, scan_path, scan_dump);
    if (spec->parsed()) return run_spectrum(c_spec, spec_fn, spec_box, spec_tol);
    if (weyl->parsed()) return run_weyl(c_weyl, g_weyl);
    if (asym->parsed())
      return run_asym(c_asym, asym_kind, asym_radii, asym_args, asym_x, asym_delta);
    if (inv->parsed()) return run_inverse(c_inv, inv_spec);
    if (scen->parsed())
      return run_scenario(c_scen, scen_name, scen_alpha, scen_alpha0, scen_a);
    if (val->parsed()) return run_validate(c_val, val_nre, val_nim, val_tol);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args);
}

}  // namespace pencil
