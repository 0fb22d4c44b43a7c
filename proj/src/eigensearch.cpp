#include "indefsl/eigensearch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "indefsl/parallel.hpp"

namespace indefsl
{

double default_eps_floor(double bound_im)
{
  return 1e-3 * std::max(1.0, bound_im);
}

SearchRegion region_from_bounds(const L1Norms &norms, std::optional<double> eps_floor)
{
  SearchRegion r;
  const double qm2 = norms.negative * norms.negative;
  r.bound_abs = std::min(norms.total * norms.total, kAbsConstant * qm2);
  r.bound_im = std::min(r.bound_abs, kImagConstant * qm2);
  r.eps_floor = eps_floor.value_or(default_eps_floor(r.bound_im));
  if (!(norms.negative > 0.0) || !(r.bound_im > r.eps_floor))
  {
    r.empty = true;
    r.rect = Rectangle{};
    return r;
  }
  r.empty = false;
  r.rect = Rectangle{-r.bound_abs, r.bound_abs, r.eps_floor, r.bound_im};
  return r;
}

cplx CachedFunction::operator()(cplx z) const
{
  const std::pair key{z.real(), z.imag()};
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end())
    {
      return it->second;
    }
  }
  const cplx v = f_(z);
  std::lock_guard lock(mutex_);
  if (cache_.emplace(key, v).second)
  {
    evaluations_++;
  }
  return v;
}

void CachedFunction::prefetch(const std::vector<cplx> &points) const
{
  std::vector<cplx> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto &z : points)
    {
      if (!cache_.contains({z.real(), z.imag()}))
      {
        missing.push_back(z);
      }
    }
  }
  parallel_for(missing.size(), [&](std::size_t i) { (void)(*this)(missing[i]); });
}

long CachedFunction::evaluations() const
{
  std::lock_guard lock(mutex_);
  return evaluations_;
}

namespace
{

// One side of a box, parametrized from its lexicographically smaller endpoint so that boxes
// sharing a side sample identical points.
struct Edge
{
  cplx lo;
  cplx hi;
  bool reversed;  // traversal runs from hi to lo

  [[nodiscard]] cplx at(double s) const { return lo + s * (hi - lo); }
};

std::array<Edge, 4> edges_of(const Rectangle &b)
{
  const cplx c0{b.re_min, b.im_min}, c1{b.re_max, b.im_min}, c2{b.re_max, b.im_max},
      c3{b.re_min, b.im_max};
  return {Edge{c0, c1, false}, Edge{c1, c2, false}, Edge{c3, c2, true}, Edge{c0, c3, true}};
}

struct PhaseWalk
{
  const CachedFunction &F;
  const WindingOptions &opts;
  const Edge &edge;
  double total = 0.0;
  bool ok = true;
  double min_abs = std::numeric_limits<double>::infinity();
  std::vector<double> magnitudes{};
  long samples = 0;

  void step(double sa, cplx fa, double sb, cplx fb, int depth)
  {
    if (fa == cplx{} || fb == cplx{} || !std::isfinite(std::abs(fa)) || !std::isfinite(std::abs(fb)))
    {
      ok = false;
      return;
    }
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= opts.max_phase_step)
    {
      total += d;
      return;
    }
    if (depth >= opts.max_refine_depth)
    {
      ok = false;
      total += d;
      return;
    }
    const double sm = 0.5 * (sa + sb);
    const cplx fm = F(edge.at(sm));
    samples++;
    min_abs = std::min(min_abs, std::abs(fm));
    step(sa, fa, sm, fm, depth + 1);
    step(sm, fm, sb, fb, depth + 1);
  }
};

// Parameters in [0, 1] with at least n steps; with max_root_step set, a step never moves
// sqrt(lambda) by more than that amount (|d lambda| <= 2 |sqrt(lambda)| step).
std::vector<double> edge_parameters(const Edge &e, int n, const WindingOptions &opts)
{
  std::vector<double> s{0.0};
  const double len = std::abs(e.hi - e.lo);
  const double uniform = 1.0 / n;
  while (s.back() < 1.0)
  {
    double ds = uniform;
    if (opts.max_root_step > 0.0)
    {
      const double root = std::sqrt(std::abs(e.at(s.back())));
      ds = std::min(ds, 2.0 * root * opts.max_root_step / len);
      ds = std::max(ds, 1.0 / opts.max_samples_per_side);
    }
    const double next = s.back() + ds;
    // Avoid a sliver step at the end.
    s.push_back(next > 1.0 - 0.25 * ds ? 1.0 : next);
  }
  return s;
}

}  // namespace

WindingResult winding_number(const CachedFunction &F, const Rectangle &box,
                             const WindingOptions &opts)
{
  if (!(box.width() > 0.0) || !(box.height() > 0.0))
  {
    throw std::invalid_argument("winding_number: degenerate rectangle");
  }
  const int n = std::max(2, opts.samples_per_side);
  const auto edges = edges_of(box);

  std::array<std::vector<double>, 4> params;
  std::vector<cplx> initial;
  for (std::size_t k = 0; k < 4; k++)
  {
    params[k] = edge_parameters(edges[k], n, opts);
    for (const double s : params[k])
    {
      initial.push_back(edges[k].at(s));
    }
  }
  F.prefetch(initial);

  WindingResult res;
  res.ok = true;
  double total = 0.0;
  std::vector<double> mags;
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 4; k++)
  {
    const auto &e = edges[k];
    const auto &s = params[k];
    const int m = static_cast<int>(s.size()) - 1;
    std::vector<cplx> v(s.size());
    for (int i = 0; i <= m; i++)
    {
      v[i] = F(e.at(s[i]));
      mags.push_back(std::abs(v[i]));
      min_abs = std::min(min_abs, std::abs(v[i]));
    }
    PhaseWalk walk{F, opts, e};
    if (!e.reversed)
    {
      for (int i = 0; i < m; i++)
      {
        walk.step(s[i], v[i], s[i + 1], v[i + 1], 0);
      }
    }
    else
    {
      for (int i = m; i > 0; i--)
      {
        walk.step(s[i], v[i], s[i - 1], v[i - 1], 0);
      }
    }
    total += walk.total;
    res.ok = res.ok && walk.ok;
    min_abs = std::min(min_abs, walk.min_abs);
    res.samples += (m + 1) + walk.samples;
  }
  std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() / 2), mags.end());
  res.median_abs = mags[mags.size() / 2];
  res.min_abs = min_abs;
  const double turns = total / (2.0 * std::numbers::pi);
  res.count = static_cast<int>(std::lround(turns));
  if (std::abs(turns - res.count) > 0.1)
  {
    res.ok = false;
  }
  if (res.min_abs < opts.near_zero_rel * res.median_abs)
  {
    res.ok = false;
  }
  return res;
}

WindingResult winding_number(const AnalyticFunction &F, const Rectangle &box,
                             const WindingOptions &opts)
{
  const CachedFunction cf(F);
  return winding_number(cf, box, opts);
}

NewtonResult newton_refine(const CachedFunction &F, cplx start, double tol, int max_iters,
                           const Rectangle *stay_inside)
{
  NewtonResult r{start, 0, false};
  cplx z = start;
  for (int it = 1; it <= max_iters; it++)
  {
    r.iterations = it;
    const double h = 1e-6 * (1.0 + std::abs(z));
    const cplx f = F(z);
    if (f == cplx{})
    {
      r.z = z;
      r.converged = true;
      return r;
    }
    const cplx df = (F(z + h) - F(z - h)) / (2.0 * h);
    if (df == cplx{} || !std::isfinite(std::abs(df)))
    {
      break;
    }
    cplx step = f / df;
    // Damp wild steps to a fraction of the box.
    if (stay_inside)
    {
      const double cap = std::max(stay_inside->width(), stay_inside->height());
      if (std::abs(step) > cap)
      {
        step *= cap / std::abs(step);
      }
    }
    const cplx next = z - step;
    if (!(next.imag() > 0.0))
    {
      break;
    }
    if (stay_inside)
    {
      const double slack = 1e-9 * std::max(stay_inside->width(), stay_inside->height());
      if (!stay_inside->contains(next, slack))
      {
        break;
      }
    }
    z = next;
    if (std::abs(step) <= tol * (1.0 + std::abs(z)))
    {
      r.z = z;
      r.converged = true;
      return r;
    }
  }
  r.z = z;
  return r;
}

int LocateResult::multiplicity_total() const
{
  int s = 0;
  for (const auto &z : zeros)
  {
    s += z.winding_count;
  }
  return s;
}

namespace
{

struct Box
{
  Rectangle rect;
  int count;
  double median;
};

// Off-centre split positions keep split lines away from symmetry axes of F.
constexpr std::array<double, 6> kSplitFractions{0.5 + 0.0137, 0.5 - 0.0229, 0.5 + 0.0411,
                                                0.5 - 0.0617, 0.5 + 0.0853, 0.5 - 0.1093};

std::string describe(const Rectangle &r)
{
  std::ostringstream os;
  os.precision(6);
  os << "[" << r.re_min << ", " << r.re_max << "] x [" << r.im_min << ", " << r.im_max << "]";
  return os.str();
}

}  // namespace

LocateResult locate_zeros(const AnalyticFunction &F, const Rectangle &region,
                          const LocateOptions &opts)
{
  LocateResult out;
  out.region = region;
  if (!(region.width() > 0.0) || !(region.height() > 0.0))
  {
    return out;
  }
  const CachedFunction cf(F);

  WindingResult top = winding_number(cf, region, opts.winding);
  for (int d = 0; d < opts.max_dilations && !top.ok; d++)
  {
    Rectangle r = out.region;
    const double dw = 0.05 * r.width(), dh = 0.05 * r.height();
    r.re_min -= dw;
    r.re_max += dw;
    r.im_max += dh;
    r.im_min = r.im_min > 0.0 ? std::max(0.5 * r.im_min, r.im_min - dh) : r.im_min - dh;
    out.warnings.push_back("zero near contour of " + describe(out.region) + "; dilated");
    out.region = r;
    top = winding_number(cf, r, opts.winding);
  }
  if (!top.ok)
  {
    out.complete = false;
    out.warnings.push_back("top-level contour unresolved after dilation");
    out.evaluations = cf.evaluations();
    return out;
  }
  out.top_level_count = top.count;
  if (top.count < 0)
  {
    out.complete = false;
    out.warnings.push_back("negative winding number (pole inside region?)");
    out.evaluations = cf.evaluations();
    return out;
  }

  const double region_size = std::max(out.region.width(), out.region.height());
  const double min_size = opts.min_box_rel * region_size;
  std::deque<Box> queue;
  if (top.count > 0)
  {
    queue.push_back({out.region, top.count, top.median_abs});
  }
  int processed = 0;

  auto certify = [&](const Box &box, const NewtonResult &nr, int multiplicity) {
    ZeroCertificate c;
    c.lambda = nr.z;
    c.winding_count = multiplicity;
    c.method = opts.method;
    c.refinement_iters = nr.iterations;
    c.converged = nr.converged;
    c.box = box.rect;
    c.residual = box.median > 0.0 ? std::abs(cf(nr.z)) / box.median : std::abs(cf(nr.z));
    if (!c.converged || c.residual > opts.residual_tol)
    {
      out.complete = false;
      out.warnings.push_back("zero in " + describe(box.rect) + " not certified (residual " +
                             std::to_string(c.residual) + ")");
    }
    out.zeros.push_back(c);
  };

  auto subdivide = [&](const Box &box) -> bool {
    const auto &r = box.rect;
    for (double fr : kSplitFractions)
    {
      const double xs = r.re_min + fr * r.width();
      const double ys = r.im_min + fr * r.height();
      const std::array<Rectangle, 4> kids{Rectangle{r.re_min, xs, r.im_min, ys},
                                          Rectangle{xs, r.re_max, r.im_min, ys},
                                          Rectangle{r.re_min, xs, ys, r.im_max},
                                          Rectangle{xs, r.re_max, ys, r.im_max}};
      std::array<WindingResult, 4> w;
      bool good = true;
      int sum = 0;
      for (std::size_t k = 0; k < 4; k++)
      {
        w[k] = winding_number(cf, kids[k], opts.winding);
        good = good && w[k].ok && w[k].count >= 0;
        sum += w[k].count;
      }
      if (!good || sum != box.count)
      {
        continue;
      }
      for (std::size_t k = 0; k < 4; k++)
      {
        if (w[k].count > 0)
        {
          queue.push_back({kids[k], w[k].count, w[k].median_abs});
        }
      }
      return true;
    }
    return false;
  };

  while (!queue.empty())
  {
    if (++processed > opts.max_boxes)
    {
      out.complete = false;
      out.warnings.push_back("box budget exhausted");
      break;
    }
    const Box box = queue.front();
    queue.pop_front();
    const bool tiny = std::max(box.rect.width(), box.rect.height()) < min_size;

    if (box.count == 1)
    {
      const auto nr = newton_refine(cf, box.rect.center(), opts.newton_tol, opts.newton_max_iters,
                                    &box.rect);
      if (nr.converged || tiny)
      {
        certify(box, nr, 1);
        continue;
      }
    }
    else if (tiny)
    {
      // Unresolved cluster: reported with its multiplicity.
      const auto nr = newton_refine(cf, box.rect.center(), opts.newton_tol, opts.newton_max_iters,
                                    &box.rect);
      NewtonResult located = nr;
      if (!box.rect.contains(nr.z))
      {
        located.z = box.rect.center();
      }
      certify(box, located, box.count);
      continue;
    }
    if (!subdivide(box))
    {
      out.warnings.push_back("could not split " + describe(box.rect) + " cleanly");
      const auto nr = newton_refine(cf, box.rect.center(), opts.newton_tol, opts.newton_max_iters,
                                    &box.rect);
      certify(box, nr, box.count);
      out.complete = false;
    }
  }

  std::sort(out.zeros.begin(), out.zeros.end(), [](const auto &a, const auto &b) {
    return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real()
                                              : a.lambda.imag() < b.lambda.imag();
  });
  if (out.multiplicity_total() != out.top_level_count)
  {
    out.complete = false;
    out.warnings.push_back("certificate multiplicities do not add up to the winding number");
  }
  out.evaluations = cf.evaluations();
  return out;
}

}  // namespace indefsl
