#include "indefsl/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "indefsl/parallel.hpp"

namespace indefsl
{

namespace
{

double sgn(double x)
{
  return x < 0.0 ? -1.0 : 1.0;
}

}  // namespace

KinkCorrection KinkCorrection::build(const PanelRule &rule)
{
  const auto n = static_cast<std::size_t>(rule.order);
  KinkCorrection c;
  c.order = rule.order;
  c.points.resize(n);
  c.weights.resize(n);
  c.basis.resize(n);
  std::vector<double> lb(n);
  for (std::size_t i = 0; i < n; i++)
  {
    const double t = rule.nodes[i];
    for (int side = 0; side < 2; side++)
    {
      const double lo = side == 0 ? -1.0 : t;
      const double hi = side == 0 ? t : 1.0;
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t m = 0; m < n; m++)
      {
        const double s = mid + half * rule.nodes[m];
        c.points[i].push_back(s);
        c.weights[i].push_back(half * rule.weights[m]);
        lagrange_basis(rule, s, lb);
        c.basis[i].insert(c.basis[i].end(), lb.begin(), lb.end());
      }
    }
  }
  return c;
}

double nystrom_spacing(double abs_lambda, double density_factor)
{
  const double h = abs_lambda > 0.0 ? std::min(0.1, 0.25 / std::sqrt(abs_lambda)) : 0.1;
  return h / density_factor;
}

NystromSystem make_system(const Potential &q, double spacing, int order)
{
  double L = q.support_radius();
  if (!(L > 0.0))
  {
    L = 1.0;
  }
  std::vector<double> bp = q.breakpoints();
  bp.insert(bp.end(), {-L, 0.0, L});
  return make_system(q, CompositeGrid(bp, spacing, order));
}

NystromSystem make_system(const Potential &q, CompositeGrid grid)
{
  if (grid.lower() < 0.0 && grid.upper() > 0.0 && !grid.has_breakpoint(0.0))
  {
    throw std::domain_error("Nystrom grid must have a panel breakpoint at 0");
  }
  const double L = q.support_radius();
  if (L > 0.0 && (grid.lower() > -L || grid.upper() < L) && !q.is_zero())
  {
    // Allow grids that miss only a region where q vanishes identically.
    for (const auto &p : q.pieces())
    {
      if (p.a < grid.lower() || p.b > grid.upper())
      {
        throw std::domain_error("Nystrom grid does not cover the potential support");
      }
    }
    if (q.kind() == PotentialKind::TruncatedAnalytic)
    {
      throw std::domain_error("Nystrom grid does not cover the potential support");
    }
  }
  NystromSystem sys;
  sys.correction = KinkCorrection::build(grid.rule());
  sys.q_values.reserve(grid.size());
  sys.sign_values.reserve(grid.size());
  for (double x : grid.nodes())
  {
    const double v = q.eval(x);
    if (!std::isfinite(v))
    {
      throw std::domain_error("potential not finite at a Nystrom node");
    }
    sys.q_values.push_back(v);
    sys.sign_values.push_back(sgn(x));
  }
  const auto n = static_cast<std::size_t>(grid.rule().order);
  sys.q_split.reserve(grid.size() * 2 * n);
  for (std::size_t j = 0; j < grid.size(); j++)
  {
    const auto &panel = grid.panels()[grid.panel_of(j)];
    const double half = 0.5 * (panel.b - panel.a), mid = 0.5 * (panel.b + panel.a);
    for (const double s : sys.correction.points[j - panel.first])
    {
      sys.q_split.push_back(q.eval(mid + half * s));
    }
  }
  sys.grid = std::move(grid);
  return sys;
}

Eigen::MatrixXcd assemble(const SpectralParameter &sp, const NystromSystem &sys)
{
  const auto &grid = sys.grid;
  const auto N = static_cast<Eigen::Index>(grid.size());
  const auto n = static_cast<std::size_t>(grid.rule().order);
  const auto &x = grid.nodes();
  const auto &w = grid.weights();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index j = 0; j < N; j++)
  {
    const auto ju = static_cast<std::size_t>(j);
    const double qj = sys.q_values[ju];
    if (qj == 0.0)
    {
      continue;
    }
    const std::size_t own = grid.panel_of(ju);
    const auto &panels = grid.panels();
    for (std::size_t p = 0; p < panels.size(); p++)
    {
      const std::size_t first = panels[p].first;
      if (p != own)
      {
        for (std::size_t k = first; k < first + n; k++)
        {
          M(j, static_cast<Eigen::Index>(k)) =
              qj * kernel(sp, x[ju], x[k]).total * sys.sign_values[k] * w[k];
        }
        continue;
      }
      const std::size_t local = ju - first;
      const double half = 0.5 * (panels[p].b - panels[p].a);
      const double mid = 0.5 * (panels[p].b + panels[p].a);
      const double s = sys.sign_values[first];
      const auto &pts = sys.correction.points[local];
      const auto &wts = sys.correction.weights[local];
      const auto &basis = sys.correction.basis[local];
      for (std::size_t m = 0; m < pts.size(); m++)
      {
        const double y = mid + half * pts[m];
        const cplx kw = qj * kernel(sp, x[ju], y).total * s * half * wts[m];
        for (std::size_t k = 0; k < n; k++)
        {
          M(j, static_cast<Eigen::Index>(first + k)) += kw * basis[m * n + k];
        }
      }
    }
  }
  return M;
}

cplx trace_correction(const SpectralParameter &sp, const NystromSystem &sys,
                      const Eigen::MatrixXcd &M)
{
  const auto &grid = sys.grid;
  const auto n = static_cast<std::size_t>(grid.rule().order);
  const auto &x = grid.nodes();
  const auto &w = grid.weights();
  cplx first{}, second{};
  for (std::size_t j = 0; j < grid.size(); j++)
  {
    const double qj = sys.q_values[j];
    if (qj == 0.0)
    {
      continue;
    }
    const auto J = static_cast<Eigen::Index>(j);
    const double s = sys.sign_values[j];
    first += w[j] * qj * s * kernel(sp, x[j], x[j]).total - M(J, J);

    const auto &panel = grid.panels()[grid.panel_of(j)];
    const std::size_t local = j - panel.first;
    const double half = 0.5 * (panel.b - panel.a), mid = 0.5 * (panel.b + panel.a);
    const auto &pts = sys.correction.points[local];
    const auto &wts = sys.correction.weights[local];
    const double *qs = &sys.q_split[j * 2 * n];
    cplx inner{};
    for (std::size_t m = 0; m < pts.size(); m++)
    {
      const double y = mid + half * pts[m];
      inner += half * wts[m] * qs[m] * kernel(sp, x[j], y).total * kernel(sp, y, x[j]).total;
    }
    // Both signs equal s inside one panel.
    cplx discrete{};
    for (std::size_t k = panel.first; k < panel.first + n; k++)
    {
      const auto K = static_cast<Eigen::Index>(k);
      discrete += M(J, K) * M(K, J);
    }
    second += w[j] * qj * inner - discrete;
  }
  return first - 0.5 * second;
}

CharacteristicValue char_det(const SpectralParameter &sp, const NystromSystem &sys,
                             bool with_singular_value)
{
  Eigen::MatrixXcd A = assemble(sp, sys);
  CharacteristicValue out;
  out.lambda = sp.lambda();
  out.correction = trace_correction(sp, sys, A);
  A += Eigen::MatrixXcd::Identity(A.rows(), A.cols());
  if (with_singular_value)
  {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    out.smallest_singular_value = svd.singularValues().minCoeff();
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const Eigen::MatrixXcd &LU = lu.matrixLU();
  double log_abs = 0.0;
  double phase = lu.permutationP().determinant() < 0 ? std::numbers::pi : 0.0;
  for (Eigen::Index i = 0; i < LU.rows(); i++)
  {
    const cplx d = LU(i, i);
    if (d == cplx{})
    {
      out.singular = true;
      out.det_value = 0.0;
      out.nystrom_det = 0.0;
      out.log_abs_det = -std::numeric_limits<double>::infinity();
      return out;
    }
    log_abs += std::log(std::abs(d));
    phase += std::arg(d);
  }
  out.nystrom_det = std::polar(std::exp(log_abs), std::remainder(phase, 2.0 * std::numbers::pi));
  log_abs += out.correction.real();
  phase = std::remainder(phase + out.correction.imag(), 2.0 * std::numbers::pi);
  out.log_abs_det = log_abs;
  out.phase = phase;
  out.det_value = std::polar(std::exp(log_abs), phase);
  return out;
}

BirmanSchwingerFunction::BirmanSchwingerFunction(Potential q, BirmanSchwingerOptions opts)
  : q_(std::move(q)), opts_(opts)
{
  if (opts_.panel_order < 1 || !(opts_.density_factor > 0.0))
  {
    throw std::invalid_argument("BirmanSchwingerFunction: invalid grid options");
  }
}

int BirmanSchwingerFunction::level(double abs_lambda) const
{
  const double a = opts_.fixed_lambda_max.value_or(abs_lambda);
  // 0.1 * 2^{-k} <= 0.25 / sqrt(a)  <=>  k >= log2(sqrt(a) / 2.5)
  if (a <= 6.25)
  {
    return 0;
  }
  return static_cast<int>(std::ceil(std::log2(std::sqrt(a) / 2.5) - 1e-12));
}

std::shared_ptr<const NystromSystem> BirmanSchwingerFunction::system_for(double abs_lambda) const
{
  const int k = level(abs_lambda);
  {
    std::lock_guard lock(mutex_);
    if (auto it = systems_.find(k); it != systems_.end())
    {
      return it->second;
    }
  }
  const double spacing = 0.1 * std::ldexp(1.0, -k) / opts_.density_factor;
  auto sys = std::make_shared<const NystromSystem>(make_system(q_, spacing, opts_.panel_order));
  std::lock_guard lock(mutex_);
  return systems_.emplace(k, std::move(sys)).first->second;
}

CharacteristicValue BirmanSchwingerFunction::evaluate(cplx lambda, bool with_singular_value) const
{
  const SpectralParameter sp(lambda);
  return char_det(sp, *system_for(std::abs(lambda)), with_singular_value);
}

cplx BirmanSchwingerFunction::operator()(cplx lambda) const
{
  return evaluate(lambda).det_value;
}

std::vector<cplx> scan_lattice(const Rectangle &region, int density_re, int density_im)
{
  if (density_re < 1 || density_im < 1)
  {
    throw std::invalid_argument("scan density must be positive");
  }
  if (!(region.im_min > 0.0) || region.re_max < region.re_min || region.im_max < region.im_min)
  {
    throw std::domain_error("scan rectangle must lie in the open upper half-plane");
  }
  auto axis = [](double lo, double hi, int n, int i) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1.0);
  };
  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(density_re) * density_im);
  for (int b = 0; b < density_im; b++)
  {
    for (int a = 0; a < density_re; a++)
    {
      pts.emplace_back(axis(region.re_min, region.re_max, density_re, a),
                       axis(region.im_min, region.im_max, density_im, b));
    }
  }
  return pts;
}

std::vector<ScanSample> candidate_scan(const Potential &q, const Rectangle &region,
                                       int density_re, int density_im,
                                       const BirmanSchwingerOptions &opts)
{
  const auto pts = scan_lattice(region, density_re, density_im);
  const BirmanSchwingerFunction F(q, opts);
  std::vector<ScanSample> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto cv = F.evaluate(pts[i]);
    out[i] = {pts[i], std::abs(cv.det_value), cv.phase};
  });
  return out;
}

}  // namespace indefsl
