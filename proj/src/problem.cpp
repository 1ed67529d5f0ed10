#include "pencil/problem.hpp"

#include <fstream>
#include <random>

#include "json.hpp"

namespace pencil {

using nlohmann::json;

ProblemSpec::ProblemSpec(Coefficients c, BoundaryMeasure m1, BoundaryMeasure m2,
                         bool strict)
    : coeffs(std::move(c)), u1(std::move(m1)), u2(std::move(m2)),
      strict_mode(strict) {
  u1.label = 1;
  u2.label = 2;
  u1.T = coeffs.T;
  u2.T = coeffs.T;
  validate();
}

ProblemSpec ProblemSpec::reflected() const {
  ProblemSpec r = *this;
  r.coeffs = coeffs.reflected();
  return r;
}

void ProblemSpec::validate() const {
  u1.validate();
  u2.validate();
  if (strict_mode && std::abs(u1.H()) <= kH1Floor)
    throw ConfigError("ProblemSpec: strict mode requires |H1| > 1e-12");
}

namespace {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

json coeff_to_json(const CoeffFunction& f) {
  json j;
  switch (f.family) {
    case CoeffFunction::Family::Constant:
      j["family"] = "constant";
      j["value"] = complex_to_json(f.value);
      break;
    case CoeffFunction::Family::PiecewiseLinear: {
      j["family"] = "piecewise_linear";
      j["x"] = f.nodes;
      json v = json::array();
      for (Complex c : f.vals) v.push_back(complex_to_json(c));
      j["v"] = v;
      break;
    }
    case CoeffFunction::Family::Trig: {
      j["family"] = "trig";
      j["omega"] = f.omega;
      j["c0"] = complex_to_json(f.c0);
      json a = json::array(), b = json::array();
      for (Complex c : f.cos_coeff) a.push_back(complex_to_json(c));
      for (Complex c : f.sin_coeff) b.push_back(complex_to_json(c));
      j["cos"] = a;
      j["sin"] = b;
      break;
    }
  }
  return j;
}

CoeffFunction coeff_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant")
    return CoeffFunction::constant(complex_from_json(j.at("value")));
  if (family == "piecewise_linear") {
    std::vector<double> x = j.at("x").get<std::vector<double>>();
    std::vector<Complex> v;
    for (const auto& e : j.at("v")) v.push_back(complex_from_json(e));
    return CoeffFunction::piecewise_linear(std::move(x), std::move(v));
  }
  if (family == "trig") {
    std::vector<Complex> a, b;
    for (const auto& e : j.at("cos")) a.push_back(complex_from_json(e));
    for (const auto& e : j.at("sin")) b.push_back(complex_from_json(e));
    return CoeffFunction::trig(j.at("omega").get<double>(),
                               complex_from_json(j.at("c0")), std::move(a),
                               std::move(b));
  }
  throw ConfigError("unknown coefficient family: " + family);
}

json measure_to_json(const BoundaryMeasure& m) {
  json j;
  json atoms = json::array();
  for (const auto& a : m.atoms)
    atoms.push_back(json::array({a.t, a.w.real(), a.w.imag()}));
  j["atoms"] = atoms;
  json d = json::array();
  for (Complex c : m.density) d.push_back(complex_to_json(c));
  j["density"] = d;
  j["grid_size"] = m.density.size();
  return j;
}

BoundaryMeasure measure_from_json(const json& j, double T, int label) {
  BoundaryMeasure m;
  m.T = T;
  m.label = label;
  for (const auto& a : j.at("atoms"))
    m.atoms.push_back({a.at(0).get<double>(),
                       Complex(a.at(1).get<double>(), a.at(2).get<double>())});
  for (const auto& e : j.at("density")) m.density.push_back(complex_from_json(e));
  if (j.contains("grid_size") &&
      j.at("grid_size").get<std::size_t>() != m.density.size())
    throw ConfigError("measure: grid_size does not match density length");
  m.validate();
  return m;
}

}  // namespace

std::string problem_to_json(const ProblemSpec& p) {
  json j;
  j["coefficients"]["T"] = p.coeffs.T;
  j["coefficients"]["p"] = coeff_to_json(p.coeffs.p);
  j["coefficients"]["q"] = coeff_to_json(p.coeffs.q);
  j["measures"]["u1"] = measure_to_json(p.u1);
  j["measures"]["u2"] = measure_to_json(p.u2);
  j["strict_mode"] = p.strict_mode;
  return j.dump(2);
}

ProblemSpec problem_from_json(const std::string& text) {
  json j = json::parse(text);
  double T = j.at("coefficients").at("T").get<double>();
  Coefficients c(T, coeff_from_json(j.at("coefficients").at("p")),
                 coeff_from_json(j.at("coefficients").at("q")));
  BoundaryMeasure u1 = measure_from_json(j.at("measures").at("u1"), T, 1);
  BoundaryMeasure u2 = measure_from_json(j.at("measures").at("u2"), T, 2);
  bool strict = j.value("strict_mode", true);
  return ProblemSpec(std::move(c), std::move(u1), std::move(u2), strict);
}

void save_problem(const ProblemSpec& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << problem_to_json(p) << '\n';
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return problem_from_json(text);
}

ProblemSpec make_random_problem(std::uint64_t seed, double T) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto cpl = [&](double mag) { return Complex(mag * uni(rng), mag * uni(rng)); };

  // p: short trig series, |coefficients| <= 1 overall.
  CoeffFunction p = CoeffFunction::trig(
      2.0 * kPi / T, cpl(0.2), {cpl(0.3), cpl(0.15)}, {cpl(0.3), cpl(0.15)});

  // q: piecewise-linear through 6 random complex values.
  std::vector<double> nodes;
  std::vector<Complex> vals;
  const int segments = 5;
  for (int i = 0; i <= segments; ++i) {
    nodes.push_back(T * static_cast<double>(i) / segments);
    vals.push_back(cpl(1.0));
  }
  CoeffFunction q = CoeffFunction::piecewise_linear(std::move(nodes), std::move(vals));

  // Measures live on [0, 0.25 T]: determinant routes built on the X pair
  // cancel a factor ~exp(Im lambda * support_end), so a compact support
  // keeps the redundant-path identities verifiable in double precision
  // across the standard lambda box.
  const double sup = 0.25 * T;
  auto make_measure = [&](int label, bool force_jump) {
    BoundaryMeasure m;
    m.T = T;
    m.label = label;
    if (force_jump) {
      Complex h = cpl(0.4);
      m.atoms.push_back({0.0, Complex(1.0, 0.0) + h});  // |H| >= 0.6 always
    } else if (uni(rng) > 0.0) {
      m.atoms.push_back({0.0, cpl(0.5)});
    }
    int extra = 1 + (rng() % 2);
    for (int i = 0; i < extra; ++i) {
      double t = 0.05 * T + (sup - 0.05 * T) * 0.5 * (uni(rng) + 1.0);
      m.atoms.push_back({t, cpl(0.5)});
    }
    // Smooth density on the same window, ramped to zero at its end.
    const int G = 257;
    Complex d1 = cpl(0.4), d2 = cpl(0.25);
    m.density.resize(G);
    for (int i = 0; i < G; ++i) {
      double t = T * static_cast<double>(i) / (G - 1);
      if (t >= sup) {
        m.density[i] = Complex{};
        continue;
      }
      double window = 0.5 * (1.0 + std::cos(kPi * t / sup));
      m.density[i] = window * (d1 * std::sin(2.0 * kPi * t / T) +
                               d2 * std::cos(4.0 * kPi * t / T));
    }
    return m;
  };

  BoundaryMeasure u1 = make_measure(1, true);
  BoundaryMeasure u2 = make_measure(2, false);
  return ProblemSpec(Coefficients(T, std::move(p), std::move(q)), std::move(u1),
                     std::move(u2), true);
}

}  // namespace pencil
