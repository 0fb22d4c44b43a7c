#pragma once

#include <optional>
#include <string>
#include <vector>

#include "indefsl/free_resolvent.hpp"
#include "indefsl/potential.hpp"
#include "indefsl/shooting.hpp"

namespace indefsl
{

struct BoundCheck
{
  double bound = 0.0;
  double value = 0.0;   // |lambda| or |Im lambda|
  double margin = 0.0;  // bound - value
  double allowed = 0.0; // margins down to -allowed still pass
  bool pass = false;
};

struct BoundEvaluation
{
  BoundCheck abs_q;       // |lambda| <= ||q||_1^2
  BoundCheck im_qminus;   // |Im lambda| <= 24 sqrt3 ||q_-||_1^2
  BoundCheck abs_qminus;  // |lambda| <= (24 sqrt3 + 18) ||q_-||_1^2
  bool pass = false;
};

/// Signed margins of the three eigenvalue bounds. A margin passes when it is at least
/// -slack_rel (1 + bound), widened by the propagated error of quadrature-derived norms.
BoundEvaluation evaluate_bounds(cplx lambda, const L1Norms &norms, double slack_rel = 1e-9);

struct InequalityCheck
{
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
};

struct LemmaChecks
{
  double identity_residual = 0.0;   // max_x |lambda U - f' conj(f) - V|
  double identity_threshold = 0.0;
  bool identity_pass = false;

  double limit_u = 0.0;  // |U(-inf)|
  double limit_v = 0.0;  // |V(-inf)|
  bool limits_pass = false;

  InequalityCheck derivative_bound;  // ||f'||_2 <= 2 ||q_-||_1 ||f||_2
  InequalityCheck sup_bound;         // ||f||_inf <= 2 sqrt(||q_-||_1) ||f||_2
  InequalityCheck weighted_bound;    // ||q f^2||_1 <= 8 ||q_-||_1^2 ||f||_2^2

  double energy_residual = 0.0;  // |lambda int sgn|f|^2 - int |f'|^2 + q|f|^2| / scale
  bool energy_pass = false;

  bool pass = false;
};

struct EigenfunctionDiagnostics
{
  std::vector<double> x;
  std::vector<double> U;  // int_x^inf sgn(t) |f(t)|^2 dt
  std::vector<double> V;  // int_x^inf |f'(t)|^2 + q(t) |f(t)|^2 dt
  double l2_f = 0.0;
  double l2_f_prime = 0.0;
  double sup_f = 0.0;
  double q_f2_l1 = 0.0;
  LemmaChecks checks;
};

struct LemmaTolerances
{
  double identity_rel = 1e-4;
  double limit_abs = 1e-6;
  double inequality_rel = 1e-6;
  double energy_rel = 1e-6;
};

/// U and V by backward cumulative quadrature with closed-form exterior tails, then the identity,
/// limit and inequality checks. Throws std::domain_error for an eigenpair without samples.
EigenfunctionDiagnostics lemma_diagnostics(const Eigenpair &pair, const Potential &q,
                                           const L1Norms &norms,
                                           const LemmaTolerances &tol = {});

struct BoundReport
{
  cplx eigenvalue;
  std::string method;
  BoundEvaluation bounds;
  std::optional<LemmaChecks> lemma;
  double tightness_abs_q = 0.0;  // |lambda| / ||q||_1^2
  bool verdict = false;
};

BoundReport make_bound_report(cplx lambda, const std::string &method, const L1Norms &norms,
                              const std::optional<EigenfunctionDiagnostics> &diag,
                              double slack_rel = 1e-9);

}  // namespace indefsl
