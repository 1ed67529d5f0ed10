#include "pencil/inverse.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "pencil/csvio.hpp"

namespace pencil {

using nlohmann::json;

void Parametrization::validate() const {
  if (!(T > 0.0)) throw ConfigError("Parametrization: T must be positive");
  if (p_dim < 0 || q_dim < 0 || dim() < 1)
    throw ConfigError("Parametrization: dimension must be >= 1");
}

Coefficients Parametrization::build(const std::vector<double>& params) const {
  if (static_cast<int>(params.size()) != dim())
    throw ConfigError("Parametrization: wrong parameter count");
  const double w = 2.0 * kPi / T;

  // p: fixed mean, zero-mean trig corrections (sin and cos have zero mean
  // over a whole period). In free_mean mode the first parameter replaces
  // the pinned mean.
  Complex p_mean = fixed_integral_p / T;
  int k0 = 0;
  if (free_mean) {
    p_mean = params[0];
    k0 = 1;
  }
  std::vector<Complex> p_sin, p_cos;
  for (int k = k0; k < p_dim; ++k) {
    if ((k - k0) % 2 == 0)
      p_sin.push_back(params[k]);
    else
      p_cos.push_back(params[k]);
  }
  CoeffFunction p =
      CoeffFunction::trig(w, p_mean, std::move(p_cos), std::move(p_sin));

  // Layout for q: params[p_dim] is the constant, then sin, cos, sin, cos...
  Complex q0{0.0, 0.0};
  std::vector<Complex> qs, qc;
  for (int k = 0; k < q_dim; ++k) {
    double v = params[p_dim + k];
    if (k == 0)
      q0 = v;
    else if (k % 2 == 1)
      qs.push_back(v);
    else
      qc.push_back(v);
  }
  CoeffFunction q = CoeffFunction::trig(w, q0, std::move(qc), std::move(qs));
  return Coefficients(T, std::move(p), std::move(q));
}

std::string to_string(DataKind k) {
  switch (k) {
    case DataKind::weyl_and_omega: return "weyl_and_omega";
    case DataKind::two_spectra: return "two_spectra";
    case DataKind::three_spectra: return "three_spectra";
  }
  return "?";
}

DataKind data_kind_from_string(const std::string& s) {
  if (s == "weyl_and_omega") return DataKind::weyl_and_omega;
  if (s == "two_spectra") return DataKind::two_spectra;
  if (s == "three_spectra") return DataKind::three_spectra;
  throw ConfigError("unknown data kind: " + s);
}

bool InverseData::empty() const {
  switch (kind) {
    case DataKind::weyl_and_omega: return weyl_samples.empty();
    case DataKind::two_spectra:
      return lambda1_targets.empty() && lambda11_targets.empty();
    case DataKind::three_spectra:
      return l0_targets.empty() && l1_targets.empty() && l2_targets.empty();
  }
  return true;
}

ProblemSpec InverseConfig::problem_at(const std::vector<double>& params) const {
  return ProblemSpec(param.build(params), u1, u2, strict_mode);
}

void InverseConfig::validate() const {
  param.validate();
  if (!strict_mode)
    throw ConfigError("InverseConfig: the inverse machinery requires strict mode");
  if (data.empty()) throw ConfigError("InverseConfig: data payload is empty");
  if (static_cast<int>(start.size()) != param.dim())
    throw ConfigError("InverseConfig: start point has wrong dimension");
  if (!(damping > 0.0)) throw ConfigError("InverseConfig: damping must be positive");
}

namespace {

void push_complex(std::vector<double>& v, Complex z) {
  v.push_back(z.real());
  v.push_back(z.imag());
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Solve (A + mu I) x = b for small dense symmetric A, by Gaussian
// elimination with partial pivoting. Returns false when singular.
bool solve_damped(std::vector<std::vector<double>> A, std::vector<double> b,
                  double mu, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int i = 0; i < n; ++i) A[i][i] += mu;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (A[piv][col] == 0.0 || !std::isfinite(A[piv][col])) return false;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
    if (!std::isfinite(x[r])) return false;
  }
  return true;
}

}  // namespace

std::vector<double> inverse_residual(const InverseConfig& config,
                                     const std::vector<double>& params,
                                     std::vector<std::string>* warnings) {
  ProblemSpec problem = config.problem_at(params);
  CharEngine engine(std::move(problem), config.ode);
  std::vector<double> r;

  switch (config.data.kind) {
    case DataKind::weyl_and_omega: {
      for (const WeylSample& s : config.data.weyl_samples) {
        CharEvaluation M = engine.eval(CharName::weylM, s.lambda);
        if (M.at_pole) {
          if (warnings)
            warnings->push_back("sample at lambda = (" +
                                fmt_double(s.lambda.real()) + ", " +
                                fmt_double(s.lambda.imag()) +
                                ") dropped: pole of M");
          continue;
        }
        CharEvaluation om = engine.eval(CharName::omega, s.lambda);
        push_complex(r, M.value * std::exp(M.scale_log) - s.M);
        push_complex(r, om.value * std::exp(om.scale_log) - s.omega);
      }
      break;
    }
    case DataKind::two_spectra: {
      for (Complex t : config.data.lambda1_targets)
        push_complex(r, engine.eval(CharName::delta1, t).scaled().value());
      for (Complex t : config.data.lambda11_targets)
        push_complex(r, engine.eval(CharName::delta11, t).scaled().value());
      break;
    }
    case DataKind::three_spectra: {
      for (Complex t : config.data.l0_targets)
        push_complex(r, engine.eval(CharName::omega, t).scaled().value());
      for (Complex t : config.data.l1_targets)
        push_complex(r, engine.eval(CharName::delta1, t).scaled().value());
      for (Complex t : config.data.l2_targets)
        push_complex(r, engine.eval(CharName::delta2, t).scaled().value());
      break;
    }
  }
  return r;
}

InverseResult inverse_solve(const InverseConfig& config) {
  config.validate();
  InverseResult res;
  std::vector<double> p = config.start;
  const int n = config.param.dim();

  std::vector<double> r = inverse_residual(config, p, &res.warnings);
  double rn = norm2(r);
  double mu = config.damping;
  res.trace.push_back({0, mu, rn, p});

  int grow_streak = 0;
  double prev_rn = rn;
  int iter = 0;
  for (; iter < config.max_iter && rn >= config.tol; ++iter) {
    const std::size_t m = r.size();
    // Forward-difference Jacobian, fixed step per parameter.
    const double h = 1e-6;
    std::vector<std::vector<double>> J(m, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k) {
      std::vector<double> pk = p;
      pk[k] += h;
      std::vector<double> rk = inverse_residual(config, pk, nullptr);
      if (rk.size() != m)
        throw SearchError("inverse_solve: residual dimension changed near a pole");
      for (std::size_t i = 0; i < m; ++i) J[i][k] = (rk[i] - r[i]) / h;
    }
    std::vector<std::vector<double>> JTJ(n, std::vector<double>(n, 0.0));
    std::vector<double> JTr(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (int a = 0; a < n; ++a) {
        JTr[a] += J[i][a] * r[i];
        for (int b = a; b < n; ++b) JTJ[a][b] += J[i][a] * J[i][b];
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b) JTJ[a][b] = JTJ[b][a];

    bool accepted = false;
    for (int esc = 0; esc < 10; ++esc) {
      std::vector<double> neg(JTr.size());
      for (std::size_t i = 0; i < JTr.size(); ++i) neg[i] = -JTr[i];
      std::vector<double> step;
      if (!solve_damped(JTJ, neg, mu, step)) {
        mu *= 10.0;
        continue;
      }
      double step_inf = 0.0;
      for (double s : step) step_inf = std::max(step_inf, std::abs(s));
      if (step_inf > config.max_step)
        for (double& s : step) s *= config.max_step / step_inf;
      std::vector<double> pn = p;
      for (int k = 0; k < n; ++k) pn[k] += step[k];
      std::vector<double> r_new;
      try {
        r_new = inverse_residual(config, pn, nullptr);
      } catch (const std::exception&) {
        mu *= 10.0;
        continue;
      }
      double rn_new = norm2(r_new);
      if (std::isfinite(rn_new) && rn_new <= rn) {
        p = std::move(pn);
        r = std::move(r_new);
        rn = rn_new;
        mu = std::max(mu / 3.0, 1e-14);
        accepted = true;
        break;
      }
      mu *= 10.0;
    }
    res.trace.push_back({iter + 1, mu, rn, p});
    if (!accepted) {
      res.message = "damping escalation exceeded (singular or stalled Jacobian)";
      res.iterations = iter + 1;
      res.final_residual = rn;
      res.params = p;
      res.coefficients = config.param.build(p);
      return res;
    }
    grow_streak = rn > prev_rn ? grow_streak + 1 : 0;
    prev_rn = rn;
    if (grow_streak >= 5) {
      res.message = "divergence: residual grew for 5 consecutive accepted steps";
      res.iterations = iter + 1;
      res.final_residual = rn;
      res.params = p;
      res.coefficients = config.param.build(p);
      return res;
    }
  }

  res.converged = rn < config.tol;
  res.message = res.converged ? "converged" : "iteration limit reached";
  res.iterations = iter;
  res.final_residual = rn;
  res.params = p;
  res.coefficients = config.param.build(p);

  if (config.condition_s_box) {
    ProblemSpec at_solution = config.problem_at(p);
    CharEngine engine(std::move(at_solution), config.ode);
    ZeroSearchOptions zopt;
    zopt.samples_per_unit = std::max(8.0, 2.0 * config.param.T);
    Spectrum xi = find_spectrum(engine, SpectrumName::Xi, *config.condition_s_box, zopt);
    Spectrum l1 =
        find_spectrum(engine, SpectrumName::Lambda1, *config.condition_s_box, zopt);
    res.condition_S = check_condition_S(xi, l1, config.condition_s_gap);
  }
  return res;
}

CharFn char_from_zeros(const std::vector<Complex>& roots, Complex normalization) {
  if (normalization == Complex{})
    throw ConfigError("char_from_zeros: normalization must be nonzero");
  int at_origin = 0;
  std::vector<Complex> rest;
  for (Complex r : roots) {
    if (std::abs(r) < 1e-12)
      ++at_origin;
    else
      rest.push_back(r);
  }
  // Greedy symmetric pairing: match each root with the best candidate for
  // its negative; leftovers stay as single factors.
  std::vector<std::pair<Complex, Complex>> pairs;
  std::vector<Complex> singles;
  std::vector<bool> used(rest.size(), false);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t best = rest.size();
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < rest.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(rest[i] + rest[j]);
      if (d < bestd) {
        bestd = d;
        best = j;
      }
    }
    // Only accept a genuinely mirror-like partner.
    if (best < rest.size() && bestd <= 0.5 * std::abs(rest[i])) {
      used[best] = true;
      pairs.emplace_back(rest[i], rest[best]);
    } else {
      singles.push_back(rest[i]);
    }
  }
  return [pairs, singles, at_origin, normalization](Complex lambda) {
    Complex prod = normalization;
    for (int k = 0; k < at_origin; ++k) prod *= lambda;
    for (const auto& [a, b] : pairs)
      prod *= (1.0 - lambda / a) * (1.0 - lambda / b);
    for (Complex a : singles) prod *= (1.0 - lambda / a);
    return prod;
  };
}

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }
Complex complex_from(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}
json complex_list_json(const std::vector<Complex>& v) {
  json a = json::array();
  for (Complex z : v) a.push_back(complex_json(z));
  return a;
}
std::vector<Complex> complex_list_from(const json& j) {
  std::vector<Complex> v;
  for (const auto& e : j) v.push_back(complex_from(e));
  return v;
}
json measure_json(const BoundaryMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms)
    atoms.push_back(json::array({a.t, a.w.real(), a.w.imag()}));
  json d = json::array();
  for (Complex c : m.density) d.push_back(complex_json(c));
  return json{{"atoms", atoms}, {"density", d}, {"grid_size", m.density.size()}};
}
BoundaryMeasure measure_from(const json& j, double T, int label) {
  BoundaryMeasure m;
  m.T = T;
  m.label = label;
  for (const auto& a : j.at("atoms"))
    m.atoms.push_back({a.at(0).get<double>(),
                       Complex(a.at(1).get<double>(), a.at(2).get<double>())});
  for (const auto& e : j.at("density")) m.density.push_back(complex_from(e));
  m.validate();
  return m;
}

}  // namespace

std::string inverse_config_to_json(const InverseConfig& c) {
  json j;
  j["parametrization"] = {{"T", c.param.T},
                          {"p_dim", c.param.p_dim},
                          {"q_dim", c.param.q_dim},
                          {"fixed_integral_p", complex_json(c.param.fixed_integral_p)},
                          {"free_mean", c.param.free_mean}};
  j["measures"]["u1"] = measure_json(c.u1);
  j["measures"]["u2"] = measure_json(c.u2);
  j["strict_mode"] = c.strict_mode;
  j["data"]["kind"] = to_string(c.data.kind);
  switch (c.data.kind) {
    case DataKind::weyl_and_omega: {
      json s = json::array();
      for (const auto& w : c.data.weyl_samples)
        s.push_back(json{{"lambda", complex_json(w.lambda)},
                         {"M", complex_json(w.M)},
                         {"omega", complex_json(w.omega)}});
      j["data"]["weyl_samples"] = s;
      break;
    }
    case DataKind::two_spectra:
      j["data"]["lambda1"] = complex_list_json(c.data.lambda1_targets);
      j["data"]["lambda11"] = complex_list_json(c.data.lambda11_targets);
      break;
    case DataKind::three_spectra:
      j["data"]["l0"] = complex_list_json(c.data.l0_targets);
      j["data"]["l1"] = complex_list_json(c.data.l1_targets);
      j["data"]["l2"] = complex_list_json(c.data.l2_targets);
      break;
  }
  j["start"] = c.start;
  j["damping"] = c.damping;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  if (c.condition_s_box)
    j["condition_s_box"] = json::array({c.condition_s_box->re0, c.condition_s_box->re1,
                                        c.condition_s_box->im0, c.condition_s_box->im1});
  return j.dump(2);
}

InverseConfig inverse_config_from_json(const std::string& text) {
  json j = json::parse(text);
  InverseConfig c;
  const json& pm = j.at("parametrization");
  c.param.T = pm.at("T").get<double>();
  c.param.p_dim = pm.at("p_dim").get<int>();
  c.param.q_dim = pm.at("q_dim").get<int>();
  c.param.fixed_integral_p = complex_from(pm.at("fixed_integral_p"));
  c.param.free_mean = pm.value("free_mean", false);
  c.u1 = measure_from(j.at("measures").at("u1"), c.param.T, 1);
  c.u2 = measure_from(j.at("measures").at("u2"), c.param.T, 2);
  c.strict_mode = j.value("strict_mode", true);
  c.data.kind = data_kind_from_string(j.at("data").at("kind").get<std::string>());
  switch (c.data.kind) {
    case DataKind::weyl_and_omega:
      for (const auto& s : j.at("data").at("weyl_samples"))
        c.data.weyl_samples.push_back({complex_from(s.at("lambda")),
                                       complex_from(s.at("M")),
                                       complex_from(s.at("omega"))});
      break;
    case DataKind::two_spectra:
      c.data.lambda1_targets = complex_list_from(j.at("data").at("lambda1"));
      c.data.lambda11_targets = complex_list_from(j.at("data").at("lambda11"));
      break;
    case DataKind::three_spectra:
      c.data.l0_targets = complex_list_from(j.at("data").at("l0"));
      c.data.l1_targets = complex_list_from(j.at("data").at("l1"));
      c.data.l2_targets = complex_list_from(j.at("data").at("l2"));
      break;
  }
  c.start = j.at("start").get<std::vector<double>>();
  c.damping = j.value("damping", 1e-3);
  c.max_iter = j.value("max_iter", 60);
  c.tol = j.value("tol", 1e-9);
  if (j.contains("condition_s_box")) {
    const auto& b = j.at("condition_s_box");
    c.condition_s_box = Box{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>()};
  }
  c.validate();
  return c;
}

std::string inverse_result_to_json(const InverseResult& r,
                                   const Parametrization& param) {
  json j;
  j["params"] = r.params;
  j["final_residual"] = r.final_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["message"] = r.message;
  j["p_dim"] = param.p_dim;
  j["q_dim"] = param.q_dim;
  if (r.condition_S) {
    j["condition_S"]["result"] = to_string(r.condition_S->result);
    j["condition_S"]["min_gap"] = r.condition_S->min_gap;
  }
  j["warnings"] = r.warnings;
  return j.dump(2);
}

}  // namespace pencil
