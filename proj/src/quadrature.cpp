#include "indefsl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace indefsl
{

namespace
{

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    return {1.0, 0.0};
  }
  for (int k = 2; k <= n; k++)
  {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

std::vector<double> barycentric_weights(const std::vector<double> &x)
{
  std::vector<double> w(x.size(), 1.0);
  for (std::size_t k = 0; k < x.size(); k++)
  {
    for (std::size_t m = 0; m < x.size(); m++)
    {
      if (m != k)
      {
        w[k] /= (x[k] - x[m]);
      }
    }
  }
  return w;
}

std::vector<double> sorted_unique(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

PanelRule gauss_legendre(int n)
{
  if (n < 1 || n > 64)
  {
    throw std::invalid_argument("gauss_legendre: order " + std::to_string(n) +
                                " outside [1, 64]");
  }
  PanelRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1)
  {
    rule.weights[0] = 2.0;
  }
  else
  {
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; i++)
    {
      // Root i counted from the right end.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; it++)
      {
        const auto [p, dp] = legendre(n, x);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16)
        {
          break;
        }
      }
      const auto [p, dp] = legendre(n, x);
      (void)p;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      rule.nodes[n - 1 - i] = x;
      rule.nodes[i] = -x;
      rule.weights[n - 1 - i] = w;
      rule.weights[i] = w;
    }
    if (n % 2 == 1)
    {
      rule.nodes[n / 2] = 0.0;
    }
  }

  // Integrals of the Lagrange basis from -1 to each node, exact with the rule itself.
  rule.cumulative.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> basis(n);
  for (int i = 0; i < n; i++)
  {
    const double half = 0.5 * (rule.nodes[i] + 1.0);
    for (int m = 0; m < n; m++)
    {
      const double t = -1.0 + half * (rule.nodes[m] + 1.0);
      lagrange_basis(rule, t, basis);
      for (int k = 0; k < n; k++)
      {
        rule.cumulative[i * n + k] += half * rule.weights[m] * basis[k];
      }
    }
  }
  return rule;
}

void lagrange_basis(const PanelRule &rule, double t, std::span<double> out)
{
  const std::size_t n = rule.nodes.size();
  // Barycentric weights are cheap to recompute relative to callers' work, but cache per order.
  thread_local std::vector<double> cached_nodes;
  thread_local std::vector<double> bw;
  if (cached_nodes != rule.nodes)
  {
    cached_nodes = rule.nodes;
    bw = barycentric_weights(rule.nodes);
  }
  for (std::size_t k = 0; k < n; k++)
  {
    if (t == rule.nodes[k])
    {
      std::fill(out.begin(), out.begin() + n, 0.0);
      out[k] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < n; k++)
  {
    out[k] = bw[k] / (t - rule.nodes[k]);
    denom += out[k];
  }
  for (std::size_t k = 0; k < n; k++)
  {
    out[k] /= denom;
  }
}

CompositeGrid::CompositeGrid(std::vector<double> breakpoints, double max_spacing, int order)
  : rule_(gauss_legendre(order))
{
  if (!(max_spacing > 0.0))
  {
    throw std::invalid_argument("CompositeGrid: spacing must be positive");
  }
  auto bp = sorted_unique(std::move(breakpoints));
  if (bp.size() < 2)
  {
    throw std::invalid_argument("CompositeGrid: need at least two breakpoints");
  }
  const double max_width = max_spacing * order;
  std::vector<double> edges{bp.front()};
  for (std::size_t s = 0; s + 1 < bp.size(); s++)
  {
    const double len = bp[s + 1] - bp[s];
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_width - 1e-12)));
    for (std::size_t p = 1; p < count; p++)
    {
      edges.push_back(bp[s] + len * static_cast<double>(p) / static_cast<double>(count));
    }
    edges.push_back(bp[s + 1]);
  }
  build(edges);
}

CompositeGrid CompositeGrid::from_panels(std::vector<double> breakpoints, int order)
{
  CompositeGrid grid;
  grid.rule_ = gauss_legendre(order);
  auto bp = sorted_unique(std::move(breakpoints));
  if (bp.size() < 2)
  {
    throw std::invalid_argument("CompositeGrid: need at least two breakpoints");
  }
  grid.build(bp);
  return grid;
}

void CompositeGrid::build(const std::vector<double> &edges)
{
  const auto n = static_cast<std::size_t>(rule_.order);
  panels_.clear();
  nodes_.clear();
  weights_.clear();
  for (std::size_t p = 0; p + 1 < edges.size(); p++)
  {
    const double a = edges[p], b = edges[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    panels_.push_back({a, b, nodes_.size()});
    for (std::size_t k = 0; k < n; k++)
    {
      nodes_.push_back(mid + half * rule_.nodes[k]);
      weights_.push_back(half * rule_.weights[k]);
    }
  }
}

bool CompositeGrid::has_breakpoint(double x) const
{
  if (panels_.empty())
  {
    return false;
  }
  if (x == panels_.front().a)
  {
    return true;
  }
  return std::any_of(panels_.begin(), panels_.end(), [x](const Panel &p) { return p.b == x; });
}

std::size_t CompositeGrid::locate(double x) const
{
  if (x < lower() || x > upper())
  {
    throw std::domain_error("CompositeGrid::locate: point outside grid");
  }
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                             [](double v, const Panel &p) { return v < p.a; });
  const auto idx = static_cast<std::size_t>(std::distance(panels_.begin(), it));
  return idx == 0 ? 0 : idx - 1;
}

namespace
{

template <typename T>
struct AdaptivePanel
{
  double a, b;
  T value;
  double error;
  bool operator<(const AdaptivePanel &o) const { return error < o.error; }
};

template <typename T, typename F>
T gauss_on(const PanelRule &rule, const F &f, double a, double b)
{
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  T sum{};
  for (int k = 0; k < rule.order; k++)
  {
    sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return half * sum;
}

template <typename T, typename F>
Integral<T> integrate_impl(const F &f, double a, double b, const IntegrateOptions &opts)
{
  if (!(a < b))
  {
    throw std::invalid_argument("integrate: require a < b");
  }
  static const PanelRule rule = gauss_legendre(10);
  auto make = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const T coarse = gauss_on<T>(rule, f, lo, hi);
    const T fine = gauss_on<T>(rule, f, lo, mid) + gauss_on<T>(rule, f, mid, hi);
    return AdaptivePanel<T>{lo, hi, fine, std::abs(fine - coarse)};
  };

  std::vector<double> edges{a};
  for (double x : opts.breakpoints)
  {
    if (x > a && x < b)
    {
      edges.push_back(x);
    }
  }
  edges.push_back(b);
  edges = sorted_unique(edges);

  std::priority_queue<AdaptivePanel<T>> heap;
  for (std::size_t i = 0; i + 1 < edges.size(); i++)
  {
    heap.push(make(edges[i], edges[i + 1]));
  }
  auto totals = [&heap]() {
    auto copy = heap;
    T value{};
    double err = 0.0;
    while (!copy.empty())
    {
      value += copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
    return std::pair{value, err};
  };

  double err_total = 0.0;
  {
    auto copy = heap;
    while (!copy.empty())
    {
      err_total += copy.top().error;
      copy.pop();
    }
  }
  while (err_total > opts.tol && static_cast<int>(heap.size()) < opts.max_panels)
  {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * (b - a))
    {
      break;
    }
    heap.pop();
    auto left = make(worst.a, mid);
    auto right = make(mid, worst.b);
    err_total += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to avoid drift from the incremental update.
  const auto [value, err] = totals();
  Integral<T> out;
  out.value = value;
  out.error_estimate = err;
  out.converged = err <= opts.tol;
  out.panels = static_cast<int>(heap.size());
  return out;
}

}  // namespace

Integral<double> integrate(const std::function<double(double)> &f, double a, double b,
                           const IntegrateOptions &opts)
{
  return integrate_impl<double>(f, a, b, opts);
}

Integral<std::complex<double>> integrate_complex(
    const std::function<std::complex<double>(double)> &f, double a, double b,
    const IntegrateOptions &opts)
{
  return integrate_impl<std::complex<double>>(f, a, b, opts);
}

}  // namespace indefsl
