#include "pencil/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace pencil {

std::string to_string(SpectrumName n) {
  switch (n) {
    case SpectrumName::Xi: return "Xi";
    case SpectrumName::Lambda1: return "Lambda1";
    case SpectrumName::Lambda2: return "Lambda2";
    case SpectrumName::Lambda11: return "Lambda11";
    case SpectrumName::L0p: return "L0p";
    case SpectrumName::L1p: return "L1p";
    case SpectrumName::L2p: return "L2p";
  }
  return "?";
}

SpectrumName spectrum_name_from_string(const std::string& s) {
  if (s == "Xi") return SpectrumName::Xi;
  if (s == "Lambda1") return SpectrumName::Lambda1;
  if (s == "Lambda2") return SpectrumName::Lambda2;
  if (s == "Lambda11") return SpectrumName::Lambda11;
  if (s == "L0p") return SpectrumName::L0p;
  if (s == "L1p") return SpectrumName::L1p;
  if (s == "L2p") return SpectrumName::L2p;
  throw ConfigError("unknown spectrum name: " + s);
}

std::string to_string(ConditionSResult r) {
  switch (r) {
    case ConditionSResult::holds: return "holds";
    case ConditionSResult::fails: return "fails";
    case ConditionSResult::undecided: return "undecided";
  }
  return "?";
}

int Spectrum::total_multiplicity() const {
  int m = 0;
  for (const auto& r : roots) m += r.multiplicity;
  return m;
}

std::vector<Complex> Spectrum::points() const {
  std::vector<Complex> p;
  p.reserve(roots.size());
  for (const auto& r : roots) p.push_back(r.lambda);
  return p;
}

bool Spectrum::all_converged() const {
  return std::all_of(roots.begin(), roots.end(),
                     [](const RootRecord& r) { return r.converged; });
}

namespace {

struct BoundaryZero {};  // internal signal: a sample fell under the floor

// Winding number of f along the rectangle boundary. Adaptive: any segment
// whose phase step reaches the threshold is bisected.
double boundary_winding(const CharFn& f, const Box& b, double floor_abs,
                        const ZeroSearchOptions& opt, double phase_step) {
  const Complex corners[5] = {{b.re0, b.im0},
                              {b.re1, b.im0},
                              {b.re1, b.im1},
                              {b.re0, b.im1},
                              {b.re0, b.im0}};
  auto eval = [&](Complex z) {
    Complex v = f(z);
    if (!finite(v)) throw SearchError("count_zeros: nonfinite sample");
    if (std::abs(v) < floor_abs) throw BoundaryZero{};
    return v;
  };

  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Complex za = corners[e], zb = corners[e + 1];
    long evals = 0;
    int m0 = std::max(
        8, static_cast<int>(std::ceil(std::abs(zb - za) * opt.samples_per_unit)));
    struct Node {
      double t;
      Complex fv;
    };
    // Worklist of unresolved sub-segments, processed left to right.
    std::vector<Node> stack;
    Node left{0.0, eval(za)};
    for (int k = m0; k >= 1; --k) {
      double t = static_cast<double>(k) / m0;
      stack.push_back({t, eval(za + t * (zb - za))});
    }
    while (!stack.empty()) {
      Node right = stack.back();
      Complex ratio = right.fv * std::conj(left.fv);
      double dphi = std::atan2(ratio.imag(), ratio.real());
      if (std::abs(dphi) < phase_step || right.t - left.t < 1e-12) {
        total += dphi;
        left = right;
        stack.pop_back();
      } else {
        if (++evals > opt.max_evals_per_edge)
          throw SearchError("count_zeros: boundary quadrature did not settle");
        double tm = 0.5 * (left.t + right.t);
        stack.push_back({tm, eval(za + tm * (zb - za))});
      }
    }
  }
  return total / (2.0 * kPi);
}

std::vector<double> boundary_abs_samples(const CharFn& f, const Box& b) {
  std::vector<double> out;
  const Complex corners[5] = {{b.re0, b.im0},
                              {b.re1, b.im0},
                              {b.re1, b.im1},
                              {b.re0, b.im1},
                              {b.re0, b.im0}};
  for (int e = 0; e < 4; ++e)
    for (int k = 0; k < 8; ++k) {
      double t = k / 8.0;
      Complex v = f(corners[e] + t * (corners[e + 1] - corners[e]));
      if (finite(v)) out.push_back(std::abs(v));
    }
  return out;
}

double boundary_max_abs(const CharFn& f, const Box& b) {
  double m = 0.0;
  for (double a : boundary_abs_samples(f, b)) m = std::max(m, a);
  return m;
}

double boundary_median_abs(const CharFn& f, const Box& b) {
  std::vector<double> s = boundary_abs_samples(f, b);
  if (s.empty()) return 1.0;
  std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
  return s[s.size() / 2];
}

int winding_to_count(double w) {
  double r = std::round(w);
  if (std::abs(w - r) > 0.1 || r < -0.5)
    throw SearchError("count_zeros: winding number did not converge to an integer");
  return static_cast<int>(r);
}

int count_in(const CharFn& f, Box box, const ZeroSearchOptions& opt,
             Box* used_box) {
  double fmax = boundary_max_abs(f, box);
  if (fmax == 0.0) throw SearchError("count_zeros: f vanishes on the boundary");
  double floor_abs = opt.boundary_floor * fmax;
  Box b = box;
  for (int attempt = 0;; ++attempt) {
    try {
      double w = boundary_winding(f, b, floor_abs, opt, opt.phase_step);
      if (std::abs(w - std::round(w)) > 0.1) {
        // One retry with a finer phase budget before giving up.
        w = boundary_winding(f, b, floor_abs, opt, opt.phase_step * 0.5);
      }
      int c = winding_to_count(w);
      if (used_box) *used_box = b;
      return c;
    } catch (const BoundaryZero&) {
      if (attempt >= opt.max_perturb)
        throw SearchError("count_zeros: zero on the boundary persisted after perturbation");
      double dr = box.width() * 1.7e-3 * (attempt + 1);
      double di = box.height() * 2.3e-3 * (attempt + 1);
      b = Box{box.re0 - dr, box.re1 + dr, box.im0 - di, box.im1 + di};
    }
  }
}

struct ClusterBox {
  Box box;
  int count;
};

// Quadrisect multi-zero boxes until each sub-box isolates one cluster:
// either it holds a single zero, or it is too small to split further
// (a genuine multiple zero, reported with the box's full winding count).
void isolate_clusters(const CharFn& f, Box box, int count,
                      const ZeroSearchOptions& opt, std::vector<ClusterBox>& out) {
  if (count == 0) return;
  double cluster_diam = 1e-6 * (1.0 + std::abs(box.center()));
  if (count == 1 || box.diag() <= cluster_diam) {
    out.push_back({box, count});
    return;
  }
  for (int jitter = 0;; ++jitter) {
    if (jitter > opt.max_perturb)
      throw SearchError("find_zeros: could not split a cluster box");
    double fx = 0.5 + 1.3e-3 * jitter;
    double fy = 0.5 + 0.9e-3 * jitter;
    double mx = box.re0 + fx * box.width();
    double my = box.im0 + fy * box.height();
    Box kids[4] = {{box.re0, mx, box.im0, my},
                   {mx, box.re1, box.im0, my},
                   {box.re0, mx, my, box.im1},
                   {mx, box.re1, my, box.im1}};
    int counts[4];
    bool ok = true;
    int sum = 0;
    for (int k = 0; k < 4 && ok; ++k) {
      try {
        Box used;
        counts[k] = count_in(f, kids[k], opt, &used);
        kids[k] = used;
        sum += counts[k];
      } catch (const SearchError&) {
        ok = false;
      }
    }
    if (!ok || sum != count) continue;  // re-jitter the split lines
    for (int k = 0; k < 4; ++k)
      isolate_clusters(f, kids[k], counts[k], opt, out);
    return;
  }
}

// Coarse |f| scan inside a box; Newton needs a seed near the zero when the
// isolating box is large.
Complex grid_seed(const CharFn& f, const Box& b) {
  Complex best = b.center();
  double bestv = std::numeric_limits<double>::infinity();
  const int m = 7;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      Complex z{b.re0 + b.width() * i / (m + 1.0),
                b.im0 + b.height() * j / (m + 1.0)};
      Complex v = f(z);
      if (finite(v) && std::abs(v) < bestv) {
        bestv = std::abs(v);
        best = z;
      }
    }
  return best;
}

// Modified Newton (z -= mult * f/f', central-difference derivative) confined
// to the cluster's neighborhood: a step that leaves it means the iteration
// is walking toward some other zero, which must not be double-reported.
bool newton_in_box(const CharFn& f, const Box& box, int mult, double tol_abs,
                   int max_iter, Complex& z) {
  double slack = 0.35 * box.diag() + 1e-5 * (1.0 + std::abs(box.center()));
  bool hit = false;
  int polish = 0;
  for (int it = 0; it < max_iter; ++it) {
    Complex fz = f(z);
    if (!finite(fz)) return false;
    if (std::abs(fz) <= tol_abs) {
      // |f| <= tol pins a multiple zero only to ~tol^(1/mult); a few more
      // steps sharpen the position until they stop shrinking.
      hit = true;
      if (mult == 1 || ++polish > 6) return true;
    }
    double h = 1e-6 * (1.0 + std::abs(z));
    Complex d = (f(z + h) - f(z - h)) / (2.0 * h);
    if (d == Complex{}) return hit;
    Complex step = static_cast<double>(mult) * fz / d;
    double max_step = box.diag() + 1e3 * h;
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);
    Complex znew = z - step;
    if (!box.contains(znew, slack)) return hit;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) return hit;
    z = znew;
  }
  return hit;
}

// Refine one cluster: try Newton from a coarse seed; when it fails (or
// escapes), tighten the isolating box by quadrisection and retry.
RootRecord refine_cluster(const CharFn& f, ClusterBox cb, double tol_abs,
                          const ZeroSearchOptions& opt) {
  Box b = cb.box;
  for (int round = 0; round < 40; ++round) {
    Complex z = b.diag() > 0.05 ? grid_seed(f, b) : b.center();
    // The final position must land inside this cluster's own box: escaping
    // into a neighbor would double-report that root and drop this one.
    if (newton_in_box(f, b, cb.count, tol_abs, opt.max_newton, z) &&
        b.contains(z, 1e-3 * b.diag() + 1e-7 * (1.0 + std::abs(z))))
      return {z, cb.count, std::abs(f(z)), true};
    if (b.diag() < 1e-9 * (1.0 + std::abs(b.center()))) break;
    // Shrink: pick the child still holding the full cluster.
    bool shrunk = false;
    for (int jitter = 0; jitter <= opt.max_perturb && !shrunk; ++jitter) {
      double fx = 0.5 + 1.3e-3 * jitter, fy = 0.5 + 0.9e-3 * jitter;
      double mx = b.re0 + fx * b.width(), my = b.im0 + fy * b.height();
      Box kids[4] = {{b.re0, mx, b.im0, my},
                     {mx, b.re1, b.im0, my},
                     {b.re0, mx, my, b.im1},
                     {mx, b.re1, my, b.im1}};
      for (Box& kid : kids) {
        try {
          Box used;
          if (count_in(f, kid, opt, &used) == cb.count) {
            b = used;
            shrunk = true;
            break;
          }
        } catch (const SearchError&) {
        }
      }
    }
    if (!shrunk) break;  // cluster straddles every split: give up on Newton
  }
  return {b.center(), cb.count, std::abs(f(b.center())), false};
}

// A multiple zero sitting on a quadrisection line can alias into adjacent
// count-1 boxes; after refinement such fragments sit within their own
// Newton shift estimate of each other and are merged back.
void merge_close_roots(const CharFn& f, std::vector<RootRecord>& roots) {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size();) {
      double sep = std::abs(roots[i].lambda - roots[j].lambda);
      if (sep < 1e-4 * (1.0 + std::abs(roots[i].lambda))) {
        auto shift = [&](const RootRecord& r) {
          double h = 1e-6 * (1.0 + std::abs(r.lambda));
          Complex d = (f(r.lambda + h) - f(r.lambda - h)) / (2.0 * h);
          return d == Complex{} ? 1e9 : std::abs(f(r.lambda) / d);
        };
        if (sep <= 50.0 * (shift(roots[i]) + shift(roots[j]) + 1e-13)) {
          double wi = roots[i].multiplicity, wj = roots[j].multiplicity;
          roots[i].lambda =
              (wi * roots[i].lambda + wj * roots[j].lambda) / (wi + wj);
          roots[i].multiplicity += roots[j].multiplicity;
          roots[i].residual = std::abs(f(roots[i].lambda));
          roots[i].converged = roots[i].converged && roots[j].converged;
          roots.erase(roots.begin() + j);
          continue;
        }
      }
      ++j;
    }
  }
}

}  // namespace

int count_zeros(const CharFn& f, Box box, const ZeroSearchOptions& opt,
                Box* used_box) {
  box.validate();
  return count_in(f, box, opt, used_box);
}

Spectrum find_zeros(const CharFn& f, Box box, const ZeroSearchOptions& opt,
                    const std::string& name) {
  box.validate();
  Spectrum spec;
  spec.name = name;
  Box used = box;
  int total = count_in(f, box, opt, &used);
  spec.box = used;
  if (total == 0) return spec;

  double scale = std::max(1.0, boundary_median_abs(f, used));
  std::vector<ClusterBox> clusters;
  isolate_clusters(f, used, total, opt, clusters);

  for (const ClusterBox& cb : clusters)
    spec.roots.push_back(refine_cluster(f, cb, opt.tol * scale, opt));
  merge_close_roots(f, spec.roots);
  // Polish merged representatives with their full multiplicity.
  for (RootRecord& r : spec.roots) {
    Complex z = r.lambda;
    Box nb{z.real() - 1e-3, z.real() + 1e-3, z.imag() - 1e-3, z.imag() + 1e-3};
    if (newton_in_box(f, nb, r.multiplicity, opt.tol * scale, 20, z)) {
      r.lambda = z;
      r.residual = std::abs(f(z));
      r.converged = true;
    }
  }
  std::sort(spec.roots.begin(), spec.roots.end(),
            [](const RootRecord& a, const RootRecord& b) {
              if (a.lambda.real() != b.lambda.real())
                return a.lambda.real() < b.lambda.real();
              return a.lambda.imag() < b.lambda.imag();
            });
  spec.residual_max = 0.0;
  for (const auto& r : spec.roots)
    spec.residual_max = std::max(spec.residual_max, r.residual);
  return spec;
}

ConditionSReport check_condition_S(const Spectrum& a, const Spectrum& b,
                                   double gap) {
  ConditionSReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& ra : a.roots)
    for (const auto& rb : b.roots) {
      double d = std::abs(ra.lambda - rb.lambda);
      if (d < rep.min_gap) {
        rep.min_gap = d;
        rep.pair_a = ra.lambda;
        rep.pair_b = rb.lambda;
      }
    }
  if (a.roots.empty() || b.roots.empty())
    rep.result = ConditionSResult::holds;
  else if (rep.min_gap < gap)
    rep.result = ConditionSResult::fails;
  else if (rep.min_gap > 10.0 * gap)
    rep.result = ConditionSResult::holds;
  else
    rep.result = ConditionSResult::undecided;
  return rep;
}

std::vector<Complex> seed_guesses(const ProblemSpec& problem, SpectrumName name,
                                  int n_lo, int n_hi) {
  if (!problem.strict_mode)
    throw ConfigError("seed_guesses: strict mode required");
  const double T = problem.T();
  const Complex P = integral_p(problem.coeffs, T);
  std::vector<Complex> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    switch (name) {
      case SpectrumName::Lambda1:
      case SpectrumName::L1p:
        out.push_back((kPi * n + P) / T);
        break;
      case SpectrumName::Lambda11:
        out.push_back((kPi * (n + 0.5) + P) / T);
        break;
      default:
        throw ConfigError("seed_guesses: no leading-order formula for " +
                          to_string(name));
    }
  }
  return out;
}

CharFn spectrum_char_fn(const CharEngine& engine, SpectrumName name) {
  CharName cn;
  switch (name) {
    case SpectrumName::Xi:
    case SpectrumName::L0p: cn = CharName::omega; break;
    case SpectrumName::Lambda1:
    case SpectrumName::L1p: cn = CharName::delta1; break;
    case SpectrumName::Lambda2:
    case SpectrumName::L2p: cn = CharName::delta2; break;
    case SpectrumName::Lambda11: cn = CharName::delta11; break;
    default: throw ConfigError("spectrum_char_fn: unsupported name");
  }
  return [&engine, cn](Complex z) {
    return engine.eval(cn, z, EvalPath::via_Z).value;
  };
}

Spectrum find_spectrum(const CharEngine& engine, SpectrumName name, Box box,
                       const ZeroSearchOptions& opt) {
  return find_zeros(spectrum_char_fn(engine, name), box, opt, to_string(name));
}

}  // namespace pencil
