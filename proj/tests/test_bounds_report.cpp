#include <doctest.h>

#include <cmath>

#include "indefsl/bounds_report.hpp"
#include "indefsl/eigensearch.hpp"

using namespace indefsl;

TEST_CASE("bound margins are plain arithmetic on the norms")
{
  const L1Norms n{4.0, 0.0, 4.0, 0.0, true};
  const auto b = evaluate_bounds(cplx(1.0, 2.0), n);
  CHECK(b.abs_q.bound == 16.0);
  CHECK(b.abs_q.margin == doctest::Approx(16.0 - std::sqrt(5.0)));
  CHECK(b.abs_q.margin == doctest::Approx(13.764).epsilon(1e-4));
  CHECK(b.im_qminus.bound == doctest::Approx(kImagConstant * 16.0));
  CHECK(b.abs_qminus.bound == doctest::Approx(kAbsConstant * 16.0));
  CHECK(b.pass);
}

TEST_CASE("an eigenvalue above the imaginary bound fails")
{
  const L1Norms n{1.0, 0.0, 1.0, 0.0, true};
  const auto b = evaluate_bounds(cplx(0.0, 50.0), n);
  CHECK(b.im_qminus.bound == doctest::Approx(41.569).epsilon(1e-4));
  CHECK(b.im_qminus.margin == doctest::Approx(-8.431).epsilon(1e-3));
  CHECK_FALSE(b.im_qminus.pass);
  CHECK_FALSE(b.pass);
}

TEST_CASE("q_- = 0 fails every non-real candidate")
{
  const L1Norms n{3.0, 3.0, 0.0, 0.0, true};
  const auto b = evaluate_bounds(cplx(0.0, 1e-3), n);
  CHECK_FALSE(b.pass);
  CHECK(b.im_qminus.bound == 0.0);
}

TEST_CASE("margins within the slack pass, beyond it fail")
{
  const L1Norms n{1.0, 0.0, 1.0, 0.0, true};
  CHECK(evaluate_bounds(cplx(0.0, 1.0 + 1e-10), n).abs_q.pass);
  CHECK_FALSE(evaluate_bounds(cplx(0.0, 1.0 + 1e-8), n).abs_q.pass);
  // A quadrature norm widens the slack by its error.
  const L1Norms q{1.0, 0.0, 1.0, 1e-6, false};
  CHECK(evaluate_bounds(cplx(0.0, 1.0 + 1e-6), q).abs_q.pass);
}

TEST_CASE("diagnostics of the depth-2 well eigenfunction")
{
  const Potential q = Potential::step_sum({{-1.0, 1.0, {-2.0}}});
  const L1Norms norms = q.l1_norms();
  const Eigenpair p = eigenfunction_samples(SpectralParameter(cplx(0.0, 1.1610307024002816)), q);
  const auto d = lemma_diagnostics(p, q, norms);
  const auto &c = d.checks;
  CHECK(d.l2_f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.identity_pass);
  CHECK(c.identity_residual < 1e-8);
  CHECK(c.limits_pass);
  CHECK(c.derivative_bound.slack > 0.0);
  CHECK(c.sup_bound.slack > 0.0);
  CHECK(c.weighted_bound.slack > 0.0);
  CHECK(c.energy_pass);
  CHECK(c.pass);
  // U and V at the rightmost node reduce to the exterior tails.
  const cplx k = principal_sqrt(p.lambda);
  const double X = p.L + p.pad;
  const double xr = d.x.back();
  const double tail_u = std::norm(p.f_right) * std::exp(-2 * k.imag() * (xr - X)) /
                        (2 * k.imag());
  CHECK(d.U.back() == doctest::Approx(tail_u).epsilon(1e-8));
  CHECK(d.V.back() == doctest::Approx(std::abs(p.lambda) * tail_u).epsilon(1e-8));

  const auto report = make_bound_report(p.lambda, "both", norms, d);
  CHECK(report.verdict);
  CHECK(report.tightness_abs_q == doctest::Approx(1.1610307024002816 / 16.0));
}

TEST_CASE("diagnostics need samples")
{
  Eigenpair empty;
  empty.lambda = cplx(0.0, 1.0);
  CHECK_THROWS_AS(lemma_diagnostics(empty, Potential(), L1Norms{}), std::domain_error);
}

TEST_CASE("a candidate that is not an eigenvalue breaks the identities")
{
  const Potential q = Potential::step_sum({{-1.0, 1.0, {-2.0}}});
  const Eigenpair p = eigenfunction_samples(SpectralParameter(cplx(0.4, 0.8)), q);
  const auto d = lemma_diagnostics(p, q, q.l1_norms());
  CHECK_FALSE(d.checks.pass);
}
