#include "indefsl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "indefsl/birman_schwinger.hpp"
#include "indefsl/parallel.hpp"
#include "indefsl/shooting.hpp"

namespace indefsl
{

namespace
{

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

bool lex_less(cplx a, cplx b)
{
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

ShootingOptions shooting_options(const RunConfig &c)
{
  ShootingOptions o;
  o.tol = c.tolerances.quadrature;
  return o;
}

BirmanSchwingerOptions bs_options(const RunConfig &c)
{
  BirmanSchwingerOptions o;
  o.panel_order = c.grid.panel_order;
  o.density_factor = c.grid.density_factor;
  return o;
}

LocateOptions locate_options(const RunConfig &c, const std::string &method)
{
  LocateOptions o;
  o.newton_tol = c.tolerances.newton;
  o.residual_tol = c.tolerances.match;
  o.max_boxes = c.search.max_boxes;
  o.method = method;
  o.winding.samples_per_side = c.search.samples_per_side;
  o.winding.max_root_step = c.search.root_step / std::max(1.0, c.potential.effective_radius());
  return o;
}

json rect_json(const Rectangle &r)
{
  return json{{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min},
              {"im_max", r.im_max}};
}

json locate_json(const LocateResult &r)
{
  json zeros = json::array();
  for (const auto &z : r.zeros)
  {
    zeros.push_back(json{{"lambda", cjson(z.lambda)},
                         {"residual", z.residual},
                         {"winding_count", z.winding_count},
                         {"method", z.method},
                         {"refinement_iters", z.refinement_iters},
                         {"converged", z.converged},
                         {"box", rect_json(z.box)}});
  }
  return json{{"region", rect_json(r.region)},
              {"top_level_count", r.top_level_count},
              {"complete", r.complete},
              {"evaluations", r.evaluations},
              {"warnings", r.warnings},
              {"zeros", zeros}};
}

json check_json(const BoundCheck &c)
{
  return json{{"bound", c.bound}, {"value", c.value}, {"margin", c.margin},
              {"allowed", c.allowed}, {"pass", c.pass}};
}

json inequality_json(const InequalityCheck &c)
{
  return json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}};
}

json lemma_json(const LemmaChecks &c)
{
  return json{{"identity", json{{"residual", c.identity_residual},
                                {"threshold", c.identity_threshold},
                                {"pass", c.identity_pass}}},
              {"limits", json{{"U", c.limit_u}, {"V", c.limit_v}, {"pass", c.limits_pass}}},
              {"derivative_bound", inequality_json(c.derivative_bound)},
              {"sup_bound", inequality_json(c.sup_bound)},
              {"weighted_bound", inequality_json(c.weighted_bound)},
              {"energy_identity", json{{"residual", c.energy_residual},
                                       {"pass", c.energy_pass}}},
              {"pass", c.pass}};
}

json norms_json(const L1Norms &n)
{
  return json{{"q_l1", n.total},          {"q_plus_l1", n.positive},
              {"q_minus_l1", n.negative}, {"error", n.error},
              {"closed_form", n.closed_form}};
}

json region_json(const SearchRegion &r)
{
  json j{{"bound_abs", r.bound_abs},
         {"bound_im", r.bound_im},
         {"eps_floor", r.eps_floor},
         {"empty", r.empty}};
  j["rectangle"] = r.empty ? json(nullptr) : rect_json(r.rect);
  return j;
}

}  // namespace

CrossValidation cross_validate(const std::vector<ZeroCertificate> &shooting,
                               const std::vector<ZeroCertificate> &birman_schwinger,
                               double cross_tol)
{
  CrossValidation cv;
  const std::size_t ns = shooting.size(), nb = birman_schwinger.size();
  auto nearest = [](cplx z, const std::vector<ZeroCertificate> &list) {
    std::size_t best = list.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < list.size(); i++)
    {
      const double d = std::abs(list[i].lambda - z);
      if (d < best_d)
      {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  std::vector<bool> used_b(nb, false);
  for (std::size_t i = 0; i < ns; i++)
  {
    const cplx zs = shooting[i].lambda;
    const std::size_t j = nearest(zs, birman_schwinger);
    if (j == nb || nearest(birman_schwinger[j].lambda, shooting) != i)
    {
      cv.unmatched_shooting.push_back(zs);
      continue;
    }
    CrossPair p;
    p.shooting = zs;
    p.birman_schwinger = birman_schwinger[j].lambda;
    p.distance = std::abs(p.shooting - p.birman_schwinger);
    p.tolerance = cross_tol * (1.0 + std::abs(zs));
    p.matched = p.distance <= p.tolerance &&
                shooting[i].winding_count == birman_schwinger[j].winding_count;
    used_b[j] = true;
    cv.pairs.push_back(p);
  }
  for (std::size_t j = 0; j < nb; j++)
  {
    if (!used_b[j])
    {
      cv.unmatched_birman_schwinger.push_back(birman_schwinger[j].lambda);
    }
  }
  return cv;
}

RunReport cmd_solve(const RunConfig &config)
{
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.config_echo = config_to_json(config);
  const Potential &q = config.potential;
  r.norms = q.l1_norms();
  r.region = region_from_bounds(r.norms, config.eps_floor);

  if (!(r.norms.negative > 0.0))
  {
    r.notes.push_back("q >= 0: no non-real eigenvalues possible");
  }
  else if (config.region)
  {
    r.search_rect = *config.region;
  }
  else if (!r.region.empty)
  {
    r.search_rect = r.region.rect;
  }
  else
  {
    r.notes.push_back("bound on Im lambda does not exceed the floor: search region empty");
  }
  if (r.search_rect)
  {
    std::ostringstream os;
    os << "certified scope: Im lambda >= " << format_number(r.search_rect->im_min)
       << "; eigenvalues below are not searched";
    r.notes.push_back(os.str());
  }

  const bool want_shoot = config.method != MethodSelection::BirmanSchwinger;
  const bool want_bs = config.method != MethodSelection::Shooting;
  if (r.search_rect)
  {
    if (want_shoot)
    {
      ShootingFunction F(q, shooting_options(config));
      r.shooting = locate_zeros([&F](cplx z) { return F(z); }, *r.search_rect,
                                locate_options(config, "shooting"));
    }
    if (want_bs)
    {
      BirmanSchwingerFunction F(q, bs_options(config));
      r.birman_schwinger = locate_zeros([&F](cplx z) { return F(z); }, *r.search_rect,
                                        locate_options(config, "birman_schwinger"));
    }
  }

  bool incomplete = false;
  if (r.shooting && !r.shooting->complete)
  {
    incomplete = true;
  }
  if (r.birman_schwinger && !r.birman_schwinger->complete)
  {
    incomplete = true;
  }

  if (r.shooting && r.birman_schwinger)
  {
    r.cross = cross_validate(r.shooting->zeros, r.birman_schwinger->zeros,
                             config.tolerances.cross);
    for (const auto &p : r.cross->pairs)
    {
      if (p.matched)
      {
        r.confirmed.push_back(p.shooting);
      }
      else
      {
        incomplete = true;
      }
    }
    if (!r.cross->unmatched_shooting.empty() || !r.cross->unmatched_birman_schwinger.empty())
    {
      incomplete = true;
    }
  }
  else if (r.shooting)
  {
    for (const auto &z : r.shooting->zeros)
    {
      r.confirmed.push_back(z.lambda);
    }
  }
  else if (r.birman_schwinger)
  {
    for (const auto &z : r.birman_schwinger->zeros)
    {
      r.confirmed.push_back(z.lambda);
    }
  }
  std::sort(r.confirmed.begin(), r.confirmed.end(), lex_less);

  // Eigenfunction diagnostics need a shooting-confirmed eigenvalue.
  r.eigenpairs.resize(want_shoot ? r.confirmed.size() : 0);
  EigenfunctionOptions eo;
  eo.pad = config.search.eigenfunction_pad;
  eo.panel_order = config.grid.panel_order;
  eo.density_factor = config.grid.density_factor;
  eo.shooting = shooting_options(config);
  parallel_for(r.eigenpairs.size(), [&](std::size_t i) {
    EigenpairSummary &s = r.eigenpairs[i];
    s.lambda = r.confirmed[i];
    try
    {
      const Eigenpair pair = eigenfunction_samples(SpectralParameter(s.lambda), q, eo);
      s.spurious = pair.spurious;
      s.derivative_mismatch = pair.derivative_mismatch;
      s.diagnostics = lemma_diagnostics(pair, q, r.norms);
    }
    catch (const std::exception &e)
    {
      s.error = e.what();
    }
  });

  bool violation = false;
  for (std::size_t i = 0; i < r.confirmed.size(); i++)
  {
    std::optional<EigenfunctionDiagnostics> diag;
    std::string method = want_shoot ? (want_bs ? "both" : "shooting") : "birman_schwinger";
    if (i < r.eigenpairs.size())
    {
      diag = r.eigenpairs[i].diagnostics;
      if (!diag || r.eigenpairs[i].spurious)
      {
        incomplete = true;
      }
    }
    BoundReport br = make_bound_report(r.confirmed[i], method, r.norms, diag);
    if (!br.bounds.pass)
    {
      // Distinguish a solver defect from a genuine violation: refine with a tighter integrator.
      ShootingOptions tight = shooting_options(config);
      tight.tol *= 1e-2;
      ShootingFunction F(q, tight);
      CachedFunction cf([&F](cplx z) { return F(z); });
      const NewtonResult nr = newton_refine(cf, r.confirmed[i], 1e-13, 60);
      const BoundEvaluation again = evaluate_bounds(nr.z, r.norms);
      std::ostringstream os;
      os << "bound violation at lambda = " << format_number(r.confirmed[i].real()) << " + "
         << format_number(r.confirmed[i].imag()) << "i "
         << (again.pass ? "disappears" : "persists") << " with a tighter integrator";
      r.notes.push_back(os.str());
    }
    if (!br.verdict)
    {
      violation = true;
    }
    r.bound_reports.push_back(br);
  }

  for (const cplx z : r.confirmed)
  {
    r.mirrored.push_back(std::conj(z));
  }

  r.verdict = !violation && !incomplete;
  r.exit_code = violation ? kExitBoundViolation : (incomplete ? kExitIncomplete : kExitOk);
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json report_to_json(const RunReport &r, bool include_timing)
{
  json j;
  j["config"] = r.config_echo;
  j["norms"] = norms_json(r.norms);
  j["region"] = region_json(r.region);
  j["searched"] = r.search_rect ? rect_json(*r.search_rect) : json(nullptr);
  json methods = json::object();
  if (r.shooting)
  {
    methods["shooting"] = locate_json(*r.shooting);
  }
  if (r.birman_schwinger)
  {
    methods["birman_schwinger"] = locate_json(*r.birman_schwinger);
  }
  j["methods"] = methods;
  if (r.cross)
  {
    json pairs = json::array();
    for (const auto &p : r.cross->pairs)
    {
      pairs.push_back(json{{"shooting", cjson(p.shooting)},
                           {"birman_schwinger", cjson(p.birman_schwinger)},
                           {"distance", p.distance},
                           {"tolerance", p.tolerance},
                           {"matched", p.matched}});
    }
    json us = json::array(), ub = json::array();
    for (const cplx z : r.cross->unmatched_shooting)
    {
      us.push_back(cjson(z));
    }
    for (const cplx z : r.cross->unmatched_birman_schwinger)
    {
      ub.push_back(cjson(z));
    }
    j["cross_validation"] =
        json{{"pairs", pairs}, {"unmatched_shooting", us}, {"unmatched_birman_schwinger", ub}};
  }
  else
  {
    j["cross_validation"] = nullptr;
  }
  json eig = json::array();
  for (std::size_t i = 0; i < r.bound_reports.size(); i++)
  {
    const auto &b = r.bound_reports[i];
    json e{{"lambda", cjson(b.eigenvalue)},
           {"method", b.method},
           {"bounds", json{{"abs_q", check_json(b.bounds.abs_q)},
                           {"im_q_minus", check_json(b.bounds.im_qminus)},
                           {"abs_q_minus", check_json(b.bounds.abs_qminus)},
                           {"pass", b.bounds.pass}}},
           {"tightness_abs_q", b.tightness_abs_q}};
    if (i < r.eigenpairs.size())
    {
      const auto &s = r.eigenpairs[i];
      json ef{{"spurious", s.spurious}, {"derivative_mismatch", s.derivative_mismatch}};
      if (s.diagnostics)
      {
        ef["l2_f"] = s.diagnostics->l2_f;
        ef["l2_f_prime"] = s.diagnostics->l2_f_prime;
        ef["sup_f"] = s.diagnostics->sup_f;
        ef["q_f2_l1"] = s.diagnostics->q_f2_l1;
      }
      if (!s.error.empty())
      {
        ef["error"] = s.error;
      }
      e["eigenfunction"] = ef;
    }
    e["lemma"] = b.lemma ? lemma_json(*b.lemma) : json(nullptr);
    e["verdict"] = b.verdict ? "pass" : "fail";
    eig.push_back(e);
  }
  j["eigenvalues"] = eig;
  json mirrored = json::array();
  for (const cplx z : r.mirrored)
  {
    mirrored.push_back(cjson(z));
  }
  j["mirrored"] = mirrored;
  j["notes"] = r.notes;
  long evals = 0;
  if (r.shooting)
  {
    evals += r.shooting->evaluations;
  }
  if (r.birman_schwinger)
  {
    evals += r.birman_schwinger->evaluations;
  }
  j["evaluations"] = evals;
  j["verdict"] = r.verdict ? "pass" : "fail";
  j["exit_code"] = r.exit_code;
  if (include_timing)
  {
    j["timing"] = json{{"wall_seconds", r.wall_seconds}};
  }
  return j;
}

std::string report_to_csv(const RunReport &r)
{
  std::ostringstream os;
  os << "re,im,method,margin_abs_q,margin_im_q_minus,margin_abs_q_minus,lemma_pass,verdict\n";
  for (const auto &b : r.bound_reports)
  {
    os << format_number(b.eigenvalue.real()) << ',' << format_number(b.eigenvalue.imag()) << ','
       << b.method << ',' << format_number(b.bounds.abs_q.margin) << ','
       << format_number(b.bounds.im_qminus.margin) << ','
       << format_number(b.bounds.abs_qminus.margin) << ','
       << (b.lemma ? (b.lemma->pass ? "pass" : "fail") : "n/a") << ','
       << (b.verdict ? "pass" : "fail") << '\n';
  }
  return os.str();
}

std::string cmd_scan(const RunConfig &config)
{
  Rectangle rect;
  if (config.scan.rectangle)
  {
    rect = *config.scan.rectangle;
  }
  else if (config.region)
  {
    rect = *config.region;
  }
  else
  {
    const SearchRegion reg = region_from_bounds(config.potential.l1_norms(), config.eps_floor);
    if (reg.empty)
    {
      throw ConfigError("scan.rectangle: search region is empty, give a rectangle explicitly");
    }
    rect = reg.rect;
  }
  const auto lattice = scan_lattice(rect, config.scan.density_re, config.scan.density_im);
  ShootingFunction shoot(config.potential, shooting_options(config));
  BirmanSchwingerFunction bs(config.potential, bs_options(config));
  std::vector<cplx> dv(lattice.size()), detv(lattice.size());
  parallel_for(lattice.size(), [&](std::size_t i) {
    dv[i] = shoot(lattice[i]);
    detv[i] = bs(lattice[i]);
  });
  std::ostringstream os;
  os << "re,im,abs_D,arg_D,abs_det,arg_det\n";
  for (std::size_t i = 0; i < lattice.size(); i++)
  {
    os << format_number(lattice[i].real()) << ',' << format_number(lattice[i].imag()) << ','
       << format_number(std::abs(dv[i])) << ',' << format_number(std::arg(dv[i])) << ','
       << format_number(std::abs(detv[i])) << ',' << format_number(std::arg(detv[i])) << '\n';
  }
  return os.str();
}

std::string cmd_kernel(const RunConfig &config)
{
  const KernelConfig &k = config.kernel;
  const SpectralParameter sp(k.lambda);
  auto axis = [](double a, double b, int n, int i) {
    return n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  };
  std::ostringstream os;
  os << "x,y,re_K,im_K,abs_K,re_C,im_C,re_D,im_D\n";
  for (int iy = 0; iy < k.ny; iy++)
  {
    const double y = axis(k.y_min, k.y_max, k.ny, iy);
    for (int ix = 0; ix < k.nx; ix++)
    {
      const double x = axis(k.x_min, k.x_max, k.nx, ix);
      const KernelValue v = kernel(sp, x, y);
      os << format_number(x) << ',' << format_number(y) << ',' << format_number(v.total.real())
         << ',' << format_number(v.total.imag()) << ',' << format_number(std::abs(v.total))
         << ',' << format_number(v.c_part.real()) << ',' << format_number(v.c_part.imag())
         << ',' << format_number(v.d_part.real()) << ',' << format_number(v.d_part.imag())
         << '\n';
    }
  }
  return os.str();
}

json bounds_to_json(const RunConfig &config)
{
  const L1Norms n = config.potential.l1_norms();
  const SearchRegion reg = region_from_bounds(n, config.eps_floor);
  const double qm2 = n.negative * n.negative;
  json j;
  j["norms"] = norms_json(n);
  j["bound_abs_q"] = n.total * n.total;
  j["bound_im_q_minus"] = kImagConstant * qm2;
  j["bound_abs_q_minus"] = kAbsConstant * qm2;
  j["region"] = region_json(reg);
  j["non_real_possible"] = n.negative > 0.0;
  return j;
}

std::string cmd_bounds(const RunConfig &config)
{
  const json j = bounds_to_json(config);
  const json &n = j["norms"];
  const json &reg = j["region"];
  std::ostringstream os;
  os << "||q||_1        = " << format_number(n["q_l1"].get<double>()) << '\n'
     << "||q_+||_1      = " << format_number(n["q_plus_l1"].get<double>()) << '\n'
     << "||q_-||_1      = " << format_number(n["q_minus_l1"].get<double>()) << '\n'
     << "norm error     = " << format_number(n["error"].get<double>())
     << (n["closed_form"].get<bool>() ? " (closed form)" : " (quadrature)") << '\n'
     << "|lambda| <= ||q||^2             : " << format_number(j["bound_abs_q"].get<double>())
     << '\n'
     << "|Im lambda| <= 24 sqrt3 ||q_-||^2: "
     << format_number(j["bound_im_q_minus"].get<double>()) << '\n'
     << "|lambda| <= (24 sqrt3 + 18) ||q_-||^2: "
     << format_number(j["bound_abs_q_minus"].get<double>()) << '\n'
     << "effective B_abs = " << format_number(reg["bound_abs"].get<double>()) << '\n'
     << "effective B_im  = " << format_number(reg["bound_im"].get<double>()) << '\n'
     << "eps_floor       = " << format_number(reg["eps_floor"].get<double>()) << '\n';
  if (!j["non_real_possible"].get<bool>())
  {
    os << "no non-real eigenvalues possible\n";
  }
  else if (reg["empty"].get<bool>())
  {
    os << "search region empty: B_im does not exceed eps_floor\n";
  }
  else
  {
    const json &rect = reg["rectangle"];
    os << "search region   = [" << format_number(rect["re_min"].get<double>()) << ", "
       << format_number(rect["re_max"].get<double>()) << "] x ["
       << format_number(rect["im_min"].get<double>()) << ", "
       << format_number(rect["im_max"].get<double>()) << "]\n";
  }
  return os.str();
}

}  // namespace indefsl
