#include "indefsl/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace indefsl
{

namespace
{

constexpr cplx I{0.0, 1.0};

using State2 = std::array<cplx, 2>;

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

State2 axpy(const State2 &y, double h, std::initializer_list<std::pair<double, const State2 *>> ks)
{
  State2 out = y;
  for (const auto &[c, k] : ks)
  {
    out[0] += h * c * (*k)[0];
    out[1] += h * c * (*k)[1];
  }
  return out;
}

class SegmentIntegrator
{
public:
  SegmentIntegrator(const SpectralParameter &sp, const Potential &q, const ShootingOptions &opts)
    : lambda_(sp.lambda()), q_(q), opts_(opts),
      kappa_(std::max(1.0, std::abs(sp.sqrt_lambda())))
  {
  }

  // Advances state to x_end through a segment on which q is smooth; `inside` picks the branch.
  void advance(ShootingState &st, double x_end)
  {
    const double span = x_end - st.x;
    if (span == 0.0)
    {
      return;
    }
    const double inside = 0.5 * (st.x + x_end);
    const double sign = inside > 0.0 ? 1.0 : -1.0;
    auto rhs = [&](double x, const State2 &y) -> State2 {
      const double qx = q_.eval_branch(x, inside);
      return {y[1], (qx - lambda_ * sign) * y[0]};
    };
    const double dir = span > 0.0 ? 1.0 : -1.0;
    if (h_ <= 0.0)
    {
      h_ = 0.05 / kappa_;
    }
    State2 y{st.f, st.f_prime};
    State2 k1 = rhs(st.x, y);
    double x = st.x;
    while (dir * (x_end - x) > 0.0)
    {
      double h = std::min(h_, std::abs(x_end - x));
      const bool last = h >= std::abs(x_end - x);
      const double hs = dir * h;
      const State2 k2 = rhs(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
      const State2 k3 = rhs(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
      const State2 k4 = rhs(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State2 k5 =
          rhs(x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const double x6 = last ? x_end : x + hs;
      const State2 k6 = rhs(
          x6, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State2 ynew =
          axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const State2 k7 = rhs(x6, ynew);
      const State2 err = axpy(State2{}, hs,
                              {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

      const double scale_old = std::max(std::abs(y[0]), std::abs(y[1]) / kappa_);
      const double scale_new = std::max(std::abs(ynew[0]), std::abs(ynew[1]) / kappa_);
      const double scale = opts_.tol * std::max({scale_old, scale_new, 1e-300});
      const double e = std::max(std::abs(err[0]), std::abs(err[1]) / kappa_) / scale;

      if (++steps_ > opts_.max_steps)
      {
        throw IntegrationFailure("shooting: step budget exhausted", x);
      }
      if (e <= 1.0 || h <= opts_.min_step)
      {
        if (e > 1.0 && h <= opts_.min_step)
        {
          throw IntegrationFailure("shooting: step size underflow", x);
        }
        x = x6;
        y = ynew;
        k1 = k7;
        const double grow = e == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(e, -0.2));
        if (!last)
        {
          h_ = h * std::max(0.2, grow);
        }
        else
        {
          h_ = std::max(h_, h * std::max(0.2, grow));
        }
        // Renormalize growing (or vanishing) states; the factor is folded into log_scale.
        const double mag = std::max(std::abs(y[0]), std::abs(y[1]) / kappa_);
        if (mag > opts_.renormalize_above || (mag < 1.0 / opts_.renormalize_above && mag > 0.0))
        {
          y[0] /= mag;
          y[1] /= mag;
          k1[0] /= mag;
          k1[1] /= mag;
          st.log_scale += std::log(mag);
          st.renormalizations++;
        }
      }
      else
      {
        h_ = h * std::max(0.2, 0.9 * std::pow(e, -0.2));
      }
      if (!std::isfinite(std::abs(y[0])) || !std::isfinite(std::abs(y[1])))
      {
        throw IntegrationFailure("shooting: non-finite state", x);
      }
    }
    st.x = x_end;
    st.f = y[0];
    st.f_prime = y[1];
  }

private:
  cplx lambda_;
  const Potential &q_;
  ShootingOptions opts_;
  double kappa_;
  double h_ = 0.0;
  long steps_ = 0;
};

}  // namespace

std::vector<ShootingState> propagate(const SpectralParameter &sp, const Potential &q,
                                     ShootingState state, const std::vector<double> &targets,
                                     const ShootingOptions &opts)
{
  std::vector<ShootingState> out;
  if (targets.empty())
  {
    return out;
  }
  SegmentIntegrator integrator(sp, q, opts);
  auto bp = q.breakpoints();
  bp.push_back(0.0);
  for (double target : targets)
  {
    const double from = state.x;
    const double lo = std::min(from, target), hi = std::max(from, target);
    std::vector<double> stops;
    for (double b : bp)
    {
      if (b > lo && b < hi)
      {
        stops.push_back(b);
      }
    }
    if (target >= from)
    {
      std::sort(stops.begin(), stops.end());
    }
    else
    {
      std::sort(stops.begin(), stops.end(), std::greater<>());
    }
    stops.push_back(target);
    for (double s : stops)
    {
      integrator.advance(state, s);
    }
    out.push_back(state);
  }
  return out;
}

ShootingState integrate_from_right(const SpectralParameter &sp, const Potential &q, double L,
                                   const ShootingOptions &opts)
{
  if (L < q.support_radius())
  {
    throw std::domain_error("integrate_from_right: L below support radius");
  }
  const cplx k = sp.sqrt_lambda();
  ShootingState st{L, 1.0, I * k, I * k * L, 0};
  return propagate(sp, q, st, {0.0}, opts).front();
}

ShootingState integrate_from_left(const SpectralParameter &sp, const Potential &q, double L,
                                  const ShootingOptions &opts)
{
  if (L < q.support_radius())
  {
    throw std::domain_error("integrate_from_left: L below support radius");
  }
  const cplx k = sp.sqrt_lambda();
  ShootingState st{-L, 1.0, k, -k * L, 0};
  return propagate(sp, q, st, {0.0}, opts).front();
}

MatchValue matching_det(const SpectralParameter &sp, const Potential &q, double L,
                        const ShootingOptions &opts)
{
  MatchValue mv;
  mv.lambda = sp.lambda();
  mv.right = integrate_from_right(sp, q, L, opts);
  mv.left = integrate_from_left(sp, q, L, opts);
  const cplx scaled = mv.right.f * mv.left.f_prime - mv.left.f * mv.right.f_prime;
  mv.D = scaled * std::exp(mv.right.log_scale + mv.left.log_scale);
  return mv;
}

double shooting_radius(const Potential &q)
{
  const double r = q.support_radius();
  return r > 0.0 ? r : 1.0;
}

ShootingFunction::ShootingFunction(Potential q, ShootingOptions opts, double L)
  : q_(std::move(q)), opts_(opts), L_(L > 0.0 ? L : shooting_radius(q_))
{
  if (L_ < q_.support_radius())
  {
    throw std::domain_error("ShootingFunction: L below support radius");
  }
}

MatchValue ShootingFunction::evaluate(cplx lambda) const
{
  return matching_det(SpectralParameter(lambda), q_, L_, opts_);
}

cplx ShootingFunction::operator()(cplx lambda) const
{
  return evaluate(lambda).D;
}

Eigenpair eigenfunction_samples(const SpectralParameter &sp, const Potential &q,
                                const EigenfunctionOptions &opts)
{
  const cplx k = sp.sqrt_lambda();
  Eigenpair ep;
  ep.lambda = sp.lambda();
  ep.method = "shooting";
  ep.L = shooting_radius(q);
  ep.pad = opts.pad;
  const double X = ep.L + opts.pad;

  std::vector<double> bp = q.breakpoints();
  bp.insert(bp.end(), {-X, -ep.L, 0.0, ep.L, X});
  const double spacing = std::min(0.1, 0.25 / std::sqrt(std::abs(sp.lambda()))) /
                         opts.density_factor;
  ep.grid = CompositeGrid(bp, spacing, opts.panel_order);
  const auto &x = ep.grid.nodes();

  // Right solution on (0, L]: nodes in decreasing order, then x = 0.
  std::vector<double> right_targets, left_targets;
  for (auto it = x.rbegin(); it != x.rend(); ++it)
  {
    if (*it > 0.0 && *it <= ep.L)
    {
      right_targets.push_back(*it);
    }
  }
  right_targets.push_back(0.0);
  for (double t : x)
  {
    if (t < 0.0 && t >= -ep.L)
    {
      left_targets.push_back(t);
    }
  }
  left_targets.push_back(0.0);

  const ShootingState right0{ep.L, 1.0, I * k, I * k * ep.L, 0};
  const ShootingState left0{-ep.L, 1.0, k, -k * ep.L, 0};
  const auto right = propagate(sp, q, right0, right_targets, opts.shooting);
  const auto left = propagate(sp, q, left0, left_targets, opts.shooting);
  const ShootingState &r0 = right.back();
  const ShootingState &l0 = left.back();

  // Relative size of D against its two products measures how far the logarithmic derivatives
  // disagree at 0.
  const cplx d_scaled = r0.f * l0.f_prime - l0.f * r0.f_prime;
  const double d_ref = std::abs(r0.f * l0.f_prime) + std::abs(l0.f * r0.f_prime);
  ep.derivative_mismatch = d_ref > 0.0 ? std::abs(d_scaled) / d_ref : 0.0;
  ep.spurious = ep.derivative_mismatch > opts.glue_tol;

  // Scale the right solution so that it meets the left one at 0 (values, or derivatives when
  // the value is the smaller of the two).
  const double kap = std::max(1.0, std::abs(k));
  cplx ratio_scaled;  // multiplies the right solution's scaled values
  if (std::abs(r0.f) * kap >= std::abs(r0.f_prime))
  {
    ratio_scaled = l0.f / r0.f;
  }
  else
  {
    ratio_scaled = l0.f_prime / r0.f_prime;
  }
  // Normalize everything relative to the left solution's scale at 0.
  auto left_value = [&](const ShootingState &s) {
    const cplx factor = std::exp(s.log_scale - l0.log_scale);
    return std::pair{factor * s.f, factor * s.f_prime};
  };
  auto right_value = [&](const ShootingState &s) {
    const cplx factor = ratio_scaled * std::exp(s.log_scale - r0.log_scale);
    return std::pair{factor * s.f, factor * s.f_prime};
  };

  ep.f.assign(x.size(), 0.0);
  ep.f_prime.assign(x.size(), 0.0);
  std::size_t ri = 0, li = 0;
  // right_targets were in decreasing order; map back by value.
  for (std::size_t j = x.size(); j-- > 0;)
  {
    if (x[j] > 0.0 && x[j] <= ep.L)
    {
      std::tie(ep.f[j], ep.f_prime[j]) = right_value(right[ri++]);
    }
  }
  for (std::size_t j = 0; j < x.size(); j++)
  {
    if (x[j] < 0.0 && x[j] >= -ep.L)
    {
      std::tie(ep.f[j], ep.f_prime[j]) = left_value(left[li++]);
    }
  }
  // Exterior nodes from the exact exponentials.
  const cplx f_at_L = right_value(right0).first;
  const cplx f_at_mL = left_value(left0).first;
  for (std::size_t j = 0; j < x.size(); j++)
  {
    if (x[j] > ep.L)
    {
      const cplx e = std::exp(I * k * (x[j] - ep.L));
      ep.f[j] = f_at_L * e;
      ep.f_prime[j] = I * k * f_at_L * e;
    }
    else if (x[j] < -ep.L)
    {
      const cplx e = std::exp(k * (x[j] + ep.L));
      ep.f[j] = f_at_mL * e;
      ep.f_prime[j] = k * f_at_mL * e;
    }
  }
  ep.f_right = f_at_L * std::exp(I * k * opts.pad);
  ep.f_left = f_at_mL * std::exp(-k * opts.pad);
  ep.f_at_zero = l0.f;

  double norm2 = std::norm(ep.f_right) / (2.0 * k.imag()) + std::norm(ep.f_left) / (2.0 * k.real());
  const auto &w = ep.grid.weights();
  for (std::size_t j = 0; j < x.size(); j++)
  {
    norm2 += w[j] * std::norm(ep.f[j]);
  }
  const double norm = std::sqrt(norm2);
  ep.l2_norm_before = norm;
  for (std::size_t j = 0; j < x.size(); j++)
  {
    ep.f[j] /= norm;
    ep.f_prime[j] /= norm;
  }
  ep.f_right /= norm;
  ep.f_left /= norm;
  ep.f_at_zero /= norm;
  return ep;
}

}  // namespace indefsl
