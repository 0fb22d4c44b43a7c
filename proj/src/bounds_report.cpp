#include "indefsl/bounds_report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "indefsl/eigensearch.hpp"

namespace indefsl
{

namespace
{

BoundCheck check(double bound, double value, double allowed)
{
  BoundCheck c;
  c.bound = bound;
  c.value = value;
  c.margin = bound - value;
  c.allowed = allowed;
  c.pass = c.margin >= -allowed;
  return c;
}

InequalityCheck inequality(double lhs, double rhs, double rel)
{
  InequalityCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.pass = c.slack >= -rel * std::max(rhs, lhs);
  return c;
}

}  // namespace

BoundEvaluation evaluate_bounds(cplx lambda, const L1Norms &norms, double slack_rel)
{
  // Bounds are quadratic in the norms: an absolute norm error e moves B = c n^2 by about 2 c n e.
  const double qn = norms.total, qm = norms.negative;
  const double e = norms.closed_form ? 0.0 : norms.error;
  const double b_abs = qn * qn;
  const double b_im = kImagConstant * qm * qm;
  const double b_absm = kAbsConstant * qm * qm;

  BoundEvaluation ev;
  ev.abs_q = check(b_abs, std::abs(lambda), slack_rel * (1.0 + b_abs) + 2.0 * qn * e + e * e);
  ev.im_qminus = check(b_im, std::abs(lambda.imag()),
                       slack_rel * (1.0 + b_im) + kImagConstant * (2.0 * qm * e + e * e));
  ev.abs_qminus = check(b_absm, std::abs(lambda),
                        slack_rel * (1.0 + b_absm) + kAbsConstant * (2.0 * qm * e + e * e));
  if (lambda.imag() != 0.0 && qm == 0.0)
  {
    // No non-real eigenvalue can exist for q >= 0; any candidate fails outright.
    ev.im_qminus.pass = false;
  }
  ev.pass = ev.abs_q.pass && ev.im_qminus.pass && ev.abs_qminus.pass;
  return ev;
}

EigenfunctionDiagnostics lemma_diagnostics(const Eigenpair &pair, const Potential &q,
                                           const L1Norms &norms, const LemmaTolerances &tol)
{
  const auto &grid = pair.grid;
  if (grid.size() == 0 || pair.f.size() != grid.size() || pair.f_prime.size() != grid.size())
  {
    throw std::domain_error("lemma_diagnostics: eigenpair lacks samples");
  }
  const cplx lambda = pair.lambda;
  const cplx k = principal_sqrt(lambda);
  const double abs_lambda = std::abs(lambda);
  const auto &x = grid.nodes();
  const auto &w = grid.weights();
  const auto &rule = grid.rule();
  const auto n = static_cast<std::size_t>(rule.order);
  const std::size_t N = grid.size();

  std::vector<double> u_density(N), v_density(N), qv(N);
  EigenfunctionDiagnostics d;
  d.x = x;
  double l2 = 0.0, l2p = 0.0, sup = 0.0, qf2 = 0.0;
  for (std::size_t j = 0; j < N; j++)
  {
    const double f2 = std::norm(pair.f[j]);
    const double fp2 = std::norm(pair.f_prime[j]);
    qv[j] = q.eval(x[j]);
    u_density[j] = (x[j] < 0.0 ? -1.0 : 1.0) * f2;
    v_density[j] = fp2 + qv[j] * f2;
    l2 += w[j] * f2;
    l2p += w[j] * fp2;
    qf2 += w[j] * std::abs(qv[j]) * f2;
    sup = std::max(sup, std::abs(pair.f[j]));
  }
  sup = std::max(sup, std::abs(pair.f_at_zero));

  // Exterior contributions from the exact exponentials.
  const double right_f2 = std::norm(pair.f_right) / (2.0 * k.imag());
  const double left_f2 = std::norm(pair.f_left) / (2.0 * k.real());
  l2 += right_f2 + left_f2;
  l2p += abs_lambda * (right_f2 + left_f2);
  d.l2_f = std::sqrt(l2);
  d.l2_f_prime = std::sqrt(l2p);
  d.sup_f = sup;
  d.q_f2_l1 = qf2;

  // Suffix integrals from +infinity, panel by panel.
  d.U.assign(N, 0.0);
  d.V.assign(N, 0.0);
  double run_u = right_f2;
  double run_v = abs_lambda * right_f2;
  const auto &panels = grid.panels();
  for (auto it = panels.rbegin(); it != panels.rend(); ++it)
  {
    const double half = 0.5 * (it->b - it->a);
    double full_u = 0.0, full_v = 0.0;
    for (std::size_t m = 0; m < n; m++)
    {
      full_u += rule.weights[m] * u_density[it->first + m];
      full_v += rule.weights[m] * v_density[it->first + m];
    }
    for (std::size_t i = 0; i < n; i++)
    {
      double part_u = 0.0, part_v = 0.0;
      for (std::size_t m = 0; m < n; m++)
      {
        part_u += rule.cumulative[i * n + m] * u_density[it->first + m];
        part_v += rule.cumulative[i * n + m] * v_density[it->first + m];
      }
      d.U[it->first + i] = run_u + half * (full_u - part_u);
      d.V[it->first + i] = run_v + half * (full_v - part_v);
    }
    run_u += half * full_u;
    run_v += half * full_v;
  }
  // run_* now hold U(-X), V(-X); add the left exterior.
  const double u_minus_inf = run_u - left_f2;
  const double v_minus_inf = run_v + abs_lambda * left_f2;

  LemmaChecks &c = d.checks;
  double residual = 0.0;
  for (std::size_t j = 0; j < N; j++)
  {
    const cplx r = lambda * d.U[j] - pair.f_prime[j] * std::conj(pair.f[j]) - d.V[j];
    residual = std::max(residual, std::abs(r));
  }
  c.identity_residual = residual;
  c.identity_threshold = tol.identity_rel * (abs_lambda * l2 + d.l2_f_prime * d.sup_f);
  c.identity_pass = residual <= c.identity_threshold;

  c.limit_u = std::abs(u_minus_inf);
  c.limit_v = std::abs(v_minus_inf);
  c.limits_pass = c.limit_u <= tol.limit_abs && c.limit_v <= tol.limit_abs;

  const double qm = norms.negative;
  c.derivative_bound = inequality(d.l2_f_prime, 2.0 * qm * d.l2_f, tol.inequality_rel);
  c.sup_bound = inequality(d.sup_f, 2.0 * std::sqrt(qm) * d.l2_f, tol.inequality_rel);
  c.weighted_bound = inequality(d.q_f2_l1, 8.0 * qm * qm * l2, tol.inequality_rel);

  const double scale = abs_lambda * l2 + l2p + qf2;
  c.energy_residual = std::abs(lambda * u_minus_inf - v_minus_inf) / scale;
  c.energy_pass = c.energy_residual <= tol.energy_rel;

  c.pass = c.identity_pass && c.limits_pass && c.derivative_bound.pass && c.sup_bound.pass &&
           c.weighted_bound.pass && c.energy_pass;
  return d;
}

BoundReport make_bound_report(cplx lambda, const std::string &method, const L1Norms &norms,
                              const std::optional<EigenfunctionDiagnostics> &diag,
                              double slack_rel)
{
  BoundReport r;
  r.eigenvalue = lambda;
  r.method = method;
  r.bounds = evaluate_bounds(lambda, norms, slack_rel);
  if (diag)
  {
    r.lemma = diag->checks;
  }
  const double b = norms.total * norms.total;
  r.tightness_abs_q = b > 0.0 ? std::abs(lambda) / b : 0.0;
  r.verdict = r.bounds.pass && (!r.lemma || r.lemma->pass);
  return r;
}

}  // namespace indefsl
