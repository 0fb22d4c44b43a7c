// Acceptance checks. Usage: acceptance N, with N in 1..12. Prints one PASS/FAIL line.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "indefsl/birman_schwinger.hpp"
#include "indefsl/eigensearch.hpp"
#include "indefsl/free_resolvent.hpp"
#include "indefsl/pipeline.hpp"
#include "indefsl/quadrature.hpp"
#include "indefsl/shooting.hpp"
#include "oracles.hpp"

using namespace indefsl;

namespace
{

const std::string kConfigs = INDEFSL_CONFIG_DIR;

struct Outcome
{
  bool pass = true;
  std::string detail;
};

std::string fmt(const char *f, double a)
{
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char *f, double a, double b)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

Potential steps_of(const std::vector<oracle::Step> &steps)
{
  std::vector<PolynomialPiece> p;
  for (const auto &s : steps)
  {
    p.push_back({s.a, s.b, {s.v}});
  }
  return Potential::step_sum(p);
}

Outcome kernel_bound()
{
  oracle::Rng rng(101);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; i++)
  {
    const cplx lambda(rng.uniform(-10, 10), rng.uniform(0.01, 10));
    const double x = rng.uniform(-20, 20), y = rng.uniform(-20, 20);
    const double k = std::abs(kernel(SpectralParameter(lambda), x, y).total);
    const double b = std::pow(std::abs(lambda), -0.5);
    worst = std::max(worst, k / b);
    violations += k > b + 1e-12;
  }
  return {violations == 0, fmt("10000 samples, %.0f violations, ", violations) +
                               fmt("max |K| |lambda|^{1/2} = %.6f", worst)};
}

Outcome kernel_solution_identity()
{
  oracle::Rng rng(102);
  double worst = 0.0;
  for (int i = 0; i < 1000; i++)
  {
    const SpectralParameter sp(cplx(rng.uniform(-10, 10), rng.uniform(0.01, 10)));
    const double x = rng.uniform(-5, 5), y = rng.uniform(-5, 5);
    const double sy = y < 0.0 ? -1.0 : 1.0;
    const cplx expect = x > y ? solution_u(sp, x).value * solution_v(sp, y).value * sy
                              : solution_v(sp, x).value * solution_u(sp, y).value * sy;
    const cplx got = kernel(sp, x, y).total * sp.wronskian();
    worst = std::max(worst, rel(got, expect));
  }
  return {worst <= 1e-12, fmt("1000 samples, max relative deviation %.3g", worst)};
}

Outcome row_integrals()
{
  oracle::Rng rng(103);
  double worst = 0.0;
  bool converged = true;
  for (int i = 0; i < 20; i++)
  {
    const cplx lambda(rng.uniform(-10, 10), rng.uniform(0.1, 10));
    const SpectralParameter sp(lambda);
    const cplx k = sp.sqrt_lambda();
    // One sample with y >= 0 and one with y < 0 per lambda covers all four integrals.
    for (const double y : {rng.uniform(0, 3), rng.uniform(-3, 0)})
    {
      // |K| decays like exp(Re k x) on the left and exp(-Im k x) on the right; sizing each side
      // separately keeps the first adaptive panels from missing the mass.
      const double left = std::min(0.0, y) - 45.0 / k.real();
      const double right = std::max(0.0, y) + 45.0 / k.imag();
      IntegrateOptions opts;
      opts.tol = 1e-11;
      opts.max_panels = 200000;
      opts.breakpoints = {std::min(0.0, y), std::max(0.0, y)};
      if (y == 0.0)
      {
        opts.breakpoints = {0.0};
      }
      const auto c = integrate([&](double x) { return std::abs(kernel(sp, x, y).c_part); },
                               left, right, opts);
      const auto d = integrate([&](double x) { return std::abs(kernel(sp, x, y).d_part); },
                               left, right, opts);
      const auto ref = oracle::row_integrals(lambda, y);
      converged = converged && c.converged && d.converged;
      worst = std::max({worst, std::abs(c.value - ref.c_abs), std::abs(d.value - ref.d_abs)});
      if (std::getenv("INDEFSL_VERBOSE"))
      {
        std::printf("  lambda %g%+gi y %g: C %.3g (est %.2g) D %.3g (est %.2g)\n", lambda.real(),
                    lambda.imag(), y, c.value - ref.c_abs, c.error_estimate, d.value - ref.d_abs,
                    d.error_estimate);
      }
    }
  }
  return {converged && worst <= 1e-8,
          fmt("20 lambdas x 2 signs of y, max abs deviation %.3g", worst) +
              (converged ? "" : ", quadrature did not converge")};
}

Outcome resolvent_residual()
{
  oracle::Rng rng(104);
  double worst = 0.0;
  const double d = 2.5e-3;
  for (int i = 0; i < 10; i++)
  {
    const SpectralParameter sp(cplx(rng.uniform(-10, 10), rng.uniform(0.1, 10)));
    for (int m = 0; m < 5; m++)
    {
      const double c = rng.uniform(-1.5, 1.5), w = rng.uniform(0.3, 1.5);
      const double amp = rng.uniform(-2, 2);
      const auto g = [&](double x) {
        const double t = (x - c) / w;
        return std::abs(t) < 1.0 ? amp * std::pow(1.0 - t * t, 6) : 0.0;
      };
      const CompositeGrid grid({c - w - 1.0, c - w, 0.0, c + w, c + w + 1.0, -3.5, 3.5}, 0.02, 10);
      std::vector<cplx> gs(grid.size());
      for (std::size_t j = 0; j < grid.size(); j++)
      {
        gs[j] = g(grid.nodes()[j]);
      }
      std::vector<double> pts;
      std::vector<double> centers;
      for (int p = 0; p < 60; p++)
      {
        const double x = rng.uniform(grid.lower() + 3 * d, grid.upper() - 3 * d);
        if (std::abs(x) < 3 * d)
        {
          continue;
        }
        centers.push_back(x);
        for (int s = -2; s <= 2; s++)
        {
          pts.push_back(x + s * d);
        }
      }
      const auto h = apply_resolvent_at(sp, grid, gs, pts);
      double res = 0.0, gmax = 0.0;
      for (std::size_t p = 0; p < centers.size(); p++)
      {
        const cplx *v = &h[5 * p];
        const cplx h2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * d * d);
        const double x = centers[p];
        const double sx = x < 0.0 ? -1.0 : 1.0;
        res = std::max(res, std::abs(sx * (-h2) - sp.lambda() * v[2] - g(x)));
      }
      for (std::size_t j = 0; j < grid.size(); j++)
      {
        gmax = std::max(gmax, std::abs(gs[j]));
      }
      worst = std::max(worst, res / gmax);
    }
  }
  return {worst <= 1e-6, fmt("10 lambdas x 5 bumps, max relative residual %.3g", worst)};
}

Outcome wronskian_constancy()
{
  oracle::Rng rng(105);
  double worst = 0.0;
  for (int i = 0; i < 10; i++)
  {
    const SpectralParameter sp(cplx(rng.uniform(-10, 10), rng.uniform(0.01, 10)));
    for (int p = 0; p < 10; p++)
    {
      const double x = rng.uniform(-5, 5);
      const auto u = solution_u(sp, x), v = solution_v(sp, x);
      const cplx w = u.value * v.derivative - u.derivative * v.value;
      worst = std::max(worst, rel(w, cplx(1.0, -1.0) * oracle::root(sp.lambda())));
    }
  }
  return {worst <= 1e-10, fmt("100 samples, max relative deviation %.3g", worst)};
}

Outcome free_emptiness()
{
  const Potential zero;
  const ShootingFunction D(zero);
  const BirmanSchwingerFunction B(zero);
  const std::vector<Rectangle> boxes{{-1.0, 1.0, 0.01, 1.0},
                                     {-10.0, 10.0, 0.5, 5.0},
                                     {0.5, 3.0, 0.001, 0.2},
                                     {-50.0, -20.0, 1.0, 40.0}};
  bool pass = true;
  int windings = 0;
  for (const auto &box : boxes)
  {
    for (const AnalyticFunction &F : {AnalyticFunction(std::cref(D)), AnalyticFunction(std::cref(B))})
    {
      const auto w = winding_number(CachedFunction(F), box);
      pass = pass && w.ok && w.count == 0;
      windings += std::abs(w.count);
    }
  }
  oracle::Rng rng(106);
  double worst = 0.0;
  for (int i = 0; i < 50; i++)
  {
    const cplx lambda(rng.uniform(-20, 20), rng.uniform(0.01, 20));
    // |2 alpha| = sqrt(2).
    const double expect = std::sqrt(2.0 * std::abs(lambda));
    worst = std::max(worst, std::abs(std::abs(D(lambda)) - expect) / expect);
    pass = pass && B(lambda) == cplx(1.0, 0.0);
  }
  pass = pass && worst <= 1e-9;
  return {pass, fmt("%.0f nonzero windings on 4 rectangles x 2 methods, ", windings) +
                    fmt("max relative |D| deviation %.3g", worst)};
}

struct SweepEntry
{
  std::string name;
  RunReport report;
};

const std::vector<SweepEntry> &sweep()
{
  static const std::vector<SweepEntry> entries = [] {
    std::vector<SweepEntry> out;
    for (const char *name : {"well_depth1", "well_depth2", "well_depth5", "well_depth10",
                             "well_depth20", "sgn_step", "two_bump", "gaussian_well"})
    {
      const RunConfig c = load_config(kConfigs + "/" + name + ".json");
      out.push_back({name, cmd_solve(c)});
      std::printf("  %s: %zu eigenvalue(s) in the upper half-plane, exit %d, %.1f s\n", name,
                  out.back().report.confirmed.size(), out.back().report.exit_code,
                  out.back().report.wall_seconds);
    }
    return out;
  }();
  return entries;
}

Outcome method_equivalence()
{
  bool pass = true;
  std::size_t matched = 0;
  std::string why;
  for (const auto &e : sweep())
  {
    const auto &r = e.report;
    if (!r.shooting || !r.birman_schwinger || !r.cross)
    {
      pass = false;
      why += " " + e.name + ":missing method";
      continue;
    }
    const auto &cv = *r.cross;
    bool ok = r.shooting->complete && r.birman_schwinger->complete &&
              cv.unmatched_shooting.empty() && cv.unmatched_birman_schwinger.empty();
    for (const auto &p : cv.pairs)
    {
      ok = ok && p.matched;
      matched += p.matched;
    }
    if (!ok)
    {
      pass = false;
      why += " " + e.name + ":unmatched";
    }
  }
  // The step potentials also have 40-digit reference eigenvalues.
  const std::map<std::string, std::string> frozen_name{
      {"well_depth1", "well depth 1"}, {"well_depth2", "well depth 2"},
      {"well_depth5", "well depth 5"}, {"well_depth10", "well depth 10"},
      {"well_depth20", "well depth 20"}, {"sgn_step", "sgn step"},
      {"two_bump", "two bump"}};
  double worst = 0.0;
  for (const auto &e : sweep())
  {
    auto it = frozen_name.find(e.name);
    if (it == frozen_name.end())
    {
      continue;
    }
    for (const auto &f : oracle::frozen_eigenvalues())
    {
      if (it->second != f.name)
      {
        continue;
      }
      if (f.eigenvalues.size() != e.report.confirmed.size())
      {
        pass = false;
        why += " " + e.name + ":count differs from reference";
        continue;
      }
      for (std::size_t i = 0; i < f.eigenvalues.size(); i++)
      {
        worst = std::max(worst, std::abs(e.report.confirmed[i] - f.eigenvalues[i]) /
                                    (1.0 + std::abs(f.eigenvalues[i])));
      }
    }
  }
  pass = pass && worst <= 1e-6;
  return {pass, fmt("%.0f matched pairs over 8 potentials, ", static_cast<double>(matched)) +
                    fmt("max deviation from reference eigenvalues %.3g", worst) + why};
}

Outcome bound_compliance()
{
  bool pass = true;
  std::size_t n = 0;
  double tightest = 0.0;
  for (const auto &e : sweep())
  {
    for (const auto &b : e.report.bound_reports)
    {
      n++;
      for (const BoundCheck *c : {&b.bounds.abs_q, &b.bounds.im_qminus, &b.bounds.abs_qminus})
      {
        pass = pass && c->margin >= -1e-9 * (1.0 + c->bound);
      }
      tightest = std::max(tightest, b.tightness_abs_q);
    }
  }
  return {pass && n > 0, fmt("%.0f eigenvalues checked, ", static_cast<double>(n)) +
                             fmt("largest |lambda| / ||q||_1^2 = %.4f", tightest)};
}

Outcome positive_emptiness()
{
  const std::vector<std::string> configs{
      R"({"potential": {"kind": "step-sum", "pieces": [{"interval": [-1, 1], "value": 2}]}})",
      R"({"potential": {"kind": "piecewise-polynomial",
                        "pieces": [{"interval": [-2, 3], "coefficients": [1, 0, 0.5]}]}})",
      R"({"potential": {"kind": "truncated-analytic", "radius": 30,
                        "terms": [{"formula": "gaussian", "amplitude": 3, "center": 0.5, "width": 2}]}})"};
  bool pass = true;
  for (const auto &text : configs)
  {
    const RunReport r = cmd_solve(config_from_json(json::parse(text)));
    pass = pass && r.exit_code == kExitOk && r.confirmed.empty() && r.region.empty &&
           !r.shooting && !r.birman_schwinger;
  }
  return {pass, "3 configs with q >= 0: empty region, no search, exit 0"};
}

Outcome eigenfunction_diagnostics()
{
  bool pass = true;
  std::size_t n = 0;
  double identity = 0.0, energy = 0.0, limits = 0.0;
  for (const auto &e : sweep())
  {
    for (const auto &b : e.report.bound_reports)
    {
      n++;
      if (!b.lemma)
      {
        pass = false;
        continue;
      }
      const auto &c = *b.lemma;
      pass = pass && c.pass && c.identity_pass && c.limits_pass && c.energy_pass &&
             c.derivative_bound.pass && c.sup_bound.pass && c.weighted_bound.pass;
      identity = std::max(identity, c.identity_residual / c.identity_threshold);
      energy = std::max(energy, c.energy_residual);
      limits = std::max({limits, c.limit_u, c.limit_v});
    }
  }
  return {pass && n > 0,
          fmt("%.0f eigenpairs, ", static_cast<double>(n)) +
              fmt("max identity residual / threshold %.3g, ", identity) +
              fmt("max limit %.3g, ", limits) + fmt("max energy residual %.3g", energy)};
}

Outcome transfer_matrix()
{
  oracle::Rng rng(111);
  double worst = 0.0;
  for (int i = 0; i < 20; i++)
  {
    const cplx lambda(rng.uniform(-30, 30), rng.uniform(0.05, 10));
    const double depth = rng.uniform(0.5, 20);
    std::vector<oracle::Step> steps;
    const int pieces = rng.integer(1, 4);
    double a = -rng.uniform(0.5, 2);
    const double b = rng.uniform(0.5, 2);
    for (int p = 0; p < pieces; p++)
    {
      const double next = p + 1 == pieces ? b : a + (b - a) / (pieces - p) * rng.uniform(0.5, 1);
      steps.push_back({a, next, depth * rng.uniform(-1, 1)});
      a = next;
    }
    const Potential q = steps_of(steps);
    const SpectralParameter sp(lambda);
    const double L = 2.0;
    const auto r = integrate_from_right(sp, q, L);
    const auto l = integrate_from_left(sp, q, L);
    const auto ro = oracle::right_at_zero(lambda, steps, L);
    const auto lo = oracle::left_at_zero(lambda, steps, L);
    worst = std::max({worst, rel(r.true_f(), ro.f), rel(r.true_f_prime(), ro.fp),
                      rel(l.true_f(), lo.f), rel(l.true_f_prime(), lo.fp)});
  }
  return {worst <= 1e-8, fmt("20 random (lambda, depth) pairs, max relative deviation %.3g", worst)};
}

Outcome root_finder_battery()
{
  oracle::Rng rng(112);
  const Rectangle region{-4.0, 4.0, 0.05, 4.0};
  bool pass = true;
  double worst = 0.0;
  int roots_inside = 0;
  for (int t = 0; t < 50; t++)
  {
    const int degree = rng.integer(1, 6);
    std::vector<cplx> roots;
    while (static_cast<int>(roots.size()) < degree)
    {
      const cplx z(rng.uniform(-6, 6), rng.uniform(-2, 6));
      // Keep roots off the contour and apart from each other.
      const bool near_edge = std::abs(z.real() - region.re_min) < 0.05 ||
                             std::abs(z.real() - region.re_max) < 0.05 ||
                             std::abs(z.imag() - region.im_min) < 0.05 ||
                             std::abs(z.imag() - region.im_max) < 0.05;
      bool crowded = false;
      for (const cplx r : roots)
      {
        crowded = crowded || std::abs(r - z) < 0.05;
      }
      if (!near_edge && !crowded)
      {
        roots.push_back(z);
      }
    }
    const AnalyticFunction F = [roots](cplx z) {
      cplx p = 1.0;
      for (const cplx r : roots)
      {
        p *= z - r;
      }
      return p;
    };
    const auto res = locate_zeros(F, region);
    std::vector<cplx> inside;
    for (const cplx r : roots)
    {
      if (region.contains(r, 0.0))
      {
        inside.push_back(r);
      }
    }
    roots_inside += static_cast<int>(inside.size());
    bool ok = res.complete && res.multiplicity_total() == res.top_level_count &&
              res.top_level_count == static_cast<int>(inside.size()) &&
              res.zeros.size() == inside.size();
    for (const cplx r : inside)
    {
      double best = INFINITY;
      for (const auto &z : res.zeros)
      {
        best = std::min(best, std::abs(z.lambda - r));
      }
      worst = std::max(worst, best);
      ok = ok && best <= 1e-9;
    }
    pass = pass && ok;
  }
  return {pass, fmt("50 polynomials, %.0f roots inside, ", roots_inside) +
                    fmt("max root error %.3g", worst)};
}

}  // namespace

int main(int argc, char **argv)
{
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"kernel bound", kernel_bound},
      {"kernel-solution identity", kernel_solution_identity},
      {"row integrals", row_integrals},
      {"resolvent residual", resolvent_residual},
      {"Wronskian constancy", wronskian_constancy},
      {"free operator has no eigenvalues", free_emptiness},
      {"shooting and Birman-Schwinger agree", method_equivalence},
      {"eigenvalue bounds", bound_compliance},
      {"non-negative potentials", positive_emptiness},
      {"eigenfunction diagnostics", eigenfunction_diagnostics},
      {"transfer matrix oracle", transfer_matrix},
      {"root finder battery", root_finder_battery},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; i++)
  {
    which.push_back(std::atoi(argv[i]));
  }
  if (which.empty())
  {
    for (int i = 1; i <= static_cast<int>(criteria.size()); i++)
    {
      which.push_back(i);
    }
  }
  bool all = true;
  for (const int n : which)
  {
    if (n < 1 || n > static_cast<int>(criteria.size()))
    {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try
    {
      o = criteria[n - 1].second();
    }
    catch (const std::exception &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, criteria[n - 1].first,
                o.detail.c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
