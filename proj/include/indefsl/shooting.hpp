#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "indefsl/free_resolvent.hpp"
#include "indefsl/potential.hpp"
#include "indefsl/quadrature.hpp"

namespace indefsl
{

/// (f, f') at x, stored as exp(log_scale) * (f, f_prime). Renormalizations fold their factors
/// into log_scale so the represented solution never changes.
struct ShootingState
{
  double x = 0.0;
  cplx f;
  cplx f_prime;
  cplx log_scale;
  int renormalizations = 0;

  [[nodiscard]] cplx true_f() const { return std::exp(log_scale) * f; }
  [[nodiscard]] cplx true_f_prime() const { return std::exp(log_scale) * f_prime; }
};

struct ShootingOptions
{
  double tol = 1e-10;               // local error tolerance of the embedded pair
  double renormalize_above = 1e10;  // |state| threshold for rescaling
  double min_step = 1e-14;
  long max_steps = 2'000'000;
};

class IntegrationFailure : public std::runtime_error
{
public:
  IntegrationFailure(const std::string &what, double position)
    : std::runtime_error(what + " at x = " + std::to_string(position)), position_(position)
  {
  }
  [[nodiscard]] double position() const { return position_; }

private:
  double position_;
};

/// Recessive solution at +infinity: f(L) = e^{i sqrt(lambda) L}, f'(L) = i sqrt(lambda) f(L),
/// integrated backward through f'' = (q - lambda) f to x = 0. Requires L >= support radius.
ShootingState integrate_from_right(const SpectralParameter &sp, const Potential &q, double L,
                                   const ShootingOptions &opts = {});

/// Recessive solution at -infinity: f(-L) = e^{-sqrt(lambda) L}, f'(-L) = sqrt(lambda) f(-L),
/// integrated forward through f'' = (q + lambda) f to x = 0.
ShootingState integrate_from_left(const SpectralParameter &sp, const Potential &q, double L,
                                  const ShootingOptions &opts = {});

/// Propagates a state from state.x to each of `targets` (monotone in the direction of travel),
/// honouring potential breakpoints and the sign change at 0. Returns one state per target.
std::vector<ShootingState> propagate(const SpectralParameter &sp, const Potential &q,
                                     ShootingState state, const std::vector<double> &targets,
                                     const ShootingOptions &opts = {});

struct MatchValue
{
  cplx lambda;
  cplx D;  // f+(0) f-'(0) - f-(0) f+'(0)
  ShootingState left;
  ShootingState right;
};

/// Matching Wronskian of the two recessive solutions at 0; zero exactly at eigenvalues.
MatchValue matching_det(const SpectralParameter &sp, const Potential &q, double L,
                        const ShootingOptions &opts = {});

/// Truncation radius used by the shooting method: the support radius, or 1 when q = 0.
double shooting_radius(const Potential &q);

/// lambda -> D(lambda) as a callable, safe for concurrent use.
class ShootingFunction
{
public:
  ShootingFunction(Potential q, ShootingOptions opts = {}, double L = 0.0);
  cplx operator()(cplx lambda) const;
  [[nodiscard]] MatchValue evaluate(cplx lambda) const;
  [[nodiscard]] double radius() const { return L_; }

private:
  Potential q_;
  ShootingOptions opts_;
  double L_;
};

/// Normalized eigenfunction glued from the two recessive solutions.
struct Eigenpair
{
  cplx lambda;
  std::string method;
  double L = 0.0;     // truncation radius used for shooting
  double pad = 0.0;   // sampled range is [-L - pad, L + pad]
  CompositeGrid grid;
  std::vector<cplx> f;
  std::vector<cplx> f_prime;
  // Exact exterior solutions: f(x) = f_right e^{i sqrt(lambda)(x - X)} for x > X and
  // f(x) = f_left e^{sqrt(lambda)(x + X)} for x < -X, with X = L + pad.
  cplx f_left;
  cplx f_right;
  cplx f_at_zero;
  double derivative_mismatch = 0.0;  // relative jump of f'/f across 0 before gluing
  bool spurious = false;
  double l2_norm_before = 0.0;
};

struct EigenfunctionOptions
{
  double pad = 1.0;
  double glue_tol = 1e-6;
  int panel_order = 10;
  double density_factor = 1.0;
  ShootingOptions shooting;
};

/// Glues left and right solutions at 0, normalizes ||f||_2 = 1 (sampled range plus the analytic
/// exterior tails) and samples (f, f') at the nodes of a composite grid on [-L-pad, L+pad].
Eigenpair eigenfunction_samples(const SpectralParameter &sp, const Potential &q,
                                const EigenfunctionOptions &opts = {});

}  // namespace indefsl
