#include "indefsl/free_resolvent.hpp"

#include <cmath>
#include <stdexcept>

namespace indefsl
{

namespace
{

constexpr cplx I{0.0, 1.0};

double sgn(double x)
{
  return x < 0.0 ? -1.0 : 1.0;
}

void check_zero_breakpoint(const CompositeGrid &grid)
{
  if (grid.lower() < 0.0 && grid.upper() > 0.0 && !grid.has_breakpoint(0.0))
  {
    throw std::domain_error("resolvent grid must have a panel breakpoint at 0");
  }
}

}  // namespace

cplx principal_sqrt(cplx lambda)
{
  if (!(lambda.imag() > 0.0))
  {
    throw std::domain_error("principal_sqrt: lambda must lie in the open upper half-plane");
  }
  const double r = std::sqrt(std::abs(lambda));
  const double half_arg = 0.5 * std::arg(lambda);  // arg in (0, pi)
  return {r * std::cos(half_arg), r * std::sin(half_arg)};
}

SpectralParameter::SpectralParameter(cplx lambda) : lambda_(lambda), root_(principal_sqrt(lambda))
{
}

KernelValue kernel(const SpectralParameter &sp, double x, double y)
{
  const cplx k = sp.sqrt_lambda();
  const cplx scale = 1.0 / (2.0 * kAlpha * k);
  KernelValue out{};
  if (x >= 0.0 && y >= 0.0)
  {
    out.c_part = scale * kAlpha * std::exp(I * k * (x + y));
    out.d_part = scale * kAlphaBar * std::exp(I * k * std::abs(x - y));
  }
  else if (x >= 0.0)
  {
    out.c_part = -scale * std::exp(k * (I * x + y));
    out.d_part = 0.0;
  }
  else if (y >= 0.0)
  {
    out.c_part = scale * std::exp(k * (x + I * y));
    out.d_part = 0.0;
  }
  else
  {
    out.c_part = -scale * kAlphaBar * std::exp(k * (x + y));
    out.d_part = -scale * kAlpha * std::exp(-k * std::abs(x - y));
  }
  out.total = out.c_part + out.d_part;
  return out;
}

SolutionValue solution_u(const SpectralParameter &sp, double x)
{
  const cplx k = sp.sqrt_lambda();
  if (x >= 0.0)
  {
    const cplx e = std::exp(I * k * x);
    return {e, I * k * e};
  }
  const cplx ep = std::exp(k * x), em = std::exp(-k * x);
  return {kAlphaBar * ep + kAlpha * em, k * (kAlphaBar * ep - kAlpha * em)};
}

SolutionValue solution_v(const SpectralParameter &sp, double x)
{
  const cplx k = sp.sqrt_lambda();
  if (x >= 0.0)
  {
    const cplx ep = std::exp(I * k * x), em = std::exp(-I * k * x);
    return {kAlpha * ep + kAlphaBar * em, I * k * (kAlpha * ep - kAlphaBar * em)};
  }
  const cplx e = std::exp(k * x);
  return {e, k * e};
}

cplx wronskian(const SpectralParameter &sp, double x)
{
  const auto u = solution_u(sp, x);
  const auto v = solution_v(sp, x);
  return u.value * v.derivative - u.derivative * v.value;
}

std::vector<cplx> apply_resolvent(const SpectralParameter &sp, const CompositeGrid &grid,
                                  std::span<const cplx> g)
{
  check_zero_breakpoint(grid);
  if (g.size() != grid.size())
  {
    throw std::invalid_argument("apply_resolvent: sample count does not match grid");
  }
  const auto &rule = grid.rule();
  const auto n = static_cast<std::size_t>(rule.order);
  const auto &x = grid.nodes();
  const std::size_t total = grid.size();

  std::vector<cplx> u(total), v(total), vg(total), ug(total);
  for (std::size_t j = 0; j < total; j++)
  {
    u[j] = solution_u(sp, x[j]).value;
    v[j] = solution_v(sp, x[j]).value;
    vg[j] = v[j] * sgn(x[j]) * g[j];
    ug[j] = u[j] * sgn(x[j]) * g[j];
  }

  // prefix[j] = int_{-inf}^{x_j} v sgn g, suffix[j] = int_{x_j}^{inf} u sgn g
  std::vector<cplx> prefix(total), suffix(total);
  cplx running{};
  for (const auto &panel : grid.panels())
  {
    const double half = 0.5 * (panel.b - panel.a);
    for (std::size_t i = 0; i < n; i++)
    {
      cplx partial{};
      for (std::size_t k = 0; k < n; k++)
      {
        partial += rule.cumulative[i * n + k] * vg[panel.first + k];
      }
      prefix[panel.first + i] = running + half * partial;
    }
    cplx full{};
    for (std::size_t k = 0; k < n; k++)
    {
      full += rule.weights[k] * vg[panel.first + k];
    }
    running += half * full;
  }
  running = 0.0;
  const auto &panels = grid.panels();
  for (auto it = panels.rbegin(); it != panels.rend(); ++it)
  {
    const double half = 0.5 * (it->b - it->a);
    cplx full{};
    for (std::size_t k = 0; k < n; k++)
    {
      full += rule.weights[k] * ug[it->first + k];
    }
    for (std::size_t i = 0; i < n; i++)
    {
      cplx partial{};
      for (std::size_t k = 0; k < n; k++)
      {
        partial += rule.cumulative[i * n + k] * ug[it->first + k];
      }
      suffix[it->first + i] = running + half * (full - partial);
    }
    running += half * full;
  }

  const cplx inv_w = 1.0 / sp.wronskian();
  std::vector<cplx> out(total);
  for (std::size_t j = 0; j < total; j++)
  {
    out[j] = inv_w * (u[j] * prefix[j] + v[j] * suffix[j]);
  }
  return out;
}

std::vector<cplx> apply_resolvent_at(const SpectralParameter &sp, const CompositeGrid &grid,
                                     std::span<const cplx> g, std::span<const double> points)
{
  check_zero_breakpoint(grid);
  if (g.size() != grid.size())
  {
    throw std::invalid_argument("apply_resolvent_at: sample count does not match grid");
  }
  const auto &rule = grid.rule();
  const auto n = static_cast<std::size_t>(rule.order);
  const auto &x = grid.nodes();
  const auto &w = grid.weights();
  const auto &panels = grid.panels();

  // Whole-panel integrals of v sgn g and u sgn g.
  std::vector<cplx> panel_v(panels.size()), panel_u(panels.size());
  for (std::size_t p = 0; p < panels.size(); p++)
  {
    for (std::size_t k = 0; k < n; k++)
    {
      const std::size_t j = panels[p].first + k;
      const double s = sgn(x[j]) * w[j];
      panel_v[p] += s * solution_v(sp, x[j]).value * g[j];
      panel_u[p] += s * solution_u(sp, x[j]).value * g[j];
    }
  }
  std::vector<cplx> before_v(panels.size() + 1), after_u(panels.size() + 1);
  for (std::size_t p = 0; p < panels.size(); p++)
  {
    before_v[p + 1] = before_v[p] + panel_v[p];
  }
  for (std::size_t p = panels.size(); p-- > 0;)
  {
    after_u[p] = after_u[p + 1] + panel_u[p];
  }

  const cplx inv_w = 1.0 / sp.wronskian();
  std::vector<double> basis(n);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (double t : points)
  {
    if (t < grid.lower() || t > grid.upper())
    {
      // Outside the support of g only one of the two integrals survives.
      if (t < grid.lower())
      {
        out.push_back(inv_w * solution_v(sp, t).value * after_u[0]);
      }
      else
      {
        out.push_back(inv_w * solution_u(sp, t).value * before_v[panels.size()]);
      }
      continue;
    }
    const std::size_t p = grid.locate(t);
    const auto &panel = panels[p];
    cplx left{}, right{};
    // Gauss rules on [a, t] and [t, b] applied to v sgn g_interp and u sgn g_interp.
    for (int side = 0; side < 2; side++)
    {
      const double lo = side == 0 ? panel.a : t;
      const double hi = side == 0 ? t : panel.b;
      if (!(hi > lo))
      {
        continue;
      }
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t m = 0; m < n; m++)
      {
        const double y = mid + half * rule.nodes[m];
        const double ref = (2.0 * y - panel.a - panel.b) / (panel.b - panel.a);
        lagrange_basis(rule, ref, basis);
        cplx gy{};
        for (std::size_t k = 0; k < n; k++)
        {
          gy += basis[k] * g[panel.first + k];
        }
        const double s = sgn(y) * half * rule.weights[m];
        if (side == 0)
        {
          left += s * solution_v(sp, y).value * gy;
        }
        else
        {
          right += s * solution_u(sp, y).value * gy;
        }
      }
    }
    const cplx a_int = before_v[p] + left;
    const cplx b_int = after_u[p + 1] + right;
    out.push_back(inv_w * (solution_u(sp, t).value * a_int + solution_v(sp, t).value * b_int));
  }
  return out;
}

}  // namespace indefsl
