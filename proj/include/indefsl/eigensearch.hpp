#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "indefsl/free_resolvent.hpp"
#include "indefsl/potential.hpp"
#include "indefsl/rectangle.hpp"

namespace indefsl
{

/// 24 sqrt(3) and 24 sqrt(3) + 18: constants of the q_- bounds.
inline const double kImagConstant = 24.0 * std::sqrt(3.0);
inline const double kAbsConstant = 24.0 * std::sqrt(3.0) + 18.0;

/// Rectangle of C+ that must contain every non-real eigenvalue above the floor.
struct SearchRegion
{
  Rectangle rect;
  double bound_abs = 0.0;  // min(||q||^2, (24 sqrt3 + 18) ||q_-||^2)
  double bound_im = 0.0;   // min(bound_abs, 24 sqrt3 ||q_-||^2)
  double eps_floor = 0.0;
  bool empty = true;
};

/// 1e-3 * max(1, bound_im).
double default_eps_floor(double bound_im);

/// [-B_abs, B_abs] x [eps_floor, B_im]. Empty when ||q_-||_1 = 0 or the floor is not below B_im.
SearchRegion region_from_bounds(const L1Norms &norms, std::optional<double> eps_floor = {});

using AnalyticFunction = std::function<cplx(cplx)>;

/// Memoizing wrapper so contours of neighbouring boxes share evaluations. Thread safe.
class CachedFunction
{
public:
  explicit CachedFunction(AnalyticFunction f) : f_(std::move(f)) {}
  cplx operator()(cplx z) const;
  void prefetch(const std::vector<cplx> &points) const;
  [[nodiscard]] long evaluations() const;

private:
  AnalyticFunction f_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, cplx> cache_;
  mutable long evaluations_ = 0;
};

struct WindingOptions
{
  int samples_per_side = 16;
  int max_refine_depth = 30;
  double max_phase_step = 1.5707963267948966;  // pi / 2
  double near_zero_rel = 1e-6;                 // |F| below this fraction of the median flags
  double max_root_step = 0.0;  // > 0: consecutive samples differ by at most this in sqrt(lambda)
  int max_samples_per_side = 20000;
};

struct WindingResult
{
  int count = 0;
  bool ok = false;  // false when a zero sits (numerically) on the contour
  double min_abs = 0.0;
  double median_abs = 0.0;
  long samples = 0;
};

/// Total change of arg F along the positively oriented boundary, divided by 2 pi. Steps whose
/// phase change exceeds max_phase_step are bisected.
WindingResult winding_number(const CachedFunction &F, const Rectangle &box,
                             const WindingOptions &opts = {});
WindingResult winding_number(const AnalyticFunction &F, const Rectangle &box,
                             const WindingOptions &opts = {});

struct ZeroCertificate
{
  cplx lambda;
  double residual = 0.0;  // |F(lambda)| / median |F| on the enclosing contour
  int winding_count = 1;  // multiplicity (> 1 for unresolved clusters)
  std::string method;
  int refinement_iters = 0;
  bool converged = false;
  Rectangle box;
};

struct LocateOptions
{
  double newton_tol = 1e-11;    // |step| <= newton_tol * (1 + |lambda|)
  double residual_tol = 1e-8;
  int newton_max_iters = 60;
  int max_boxes = 20000;
  double min_box_rel = 1e-9;    // box side below this fraction of the region is a cluster
  int max_dilations = 3;
  std::string method = "custom";
  WindingOptions winding;
};

struct LocateResult
{
  std::vector<ZeroCertificate> zeros;  // sorted by (Re, Im)
  int top_level_count = 0;
  bool complete = true;
  Rectangle region;  // after any dilation
  long evaluations = 0;
  std::vector<std::string> warnings;

  [[nodiscard]] int multiplicity_total() const;
};

/// All zeros of F in the region: argument-principle counts, quadtree subdivision until every
/// box holds at most one zero, then Newton from the box centre with central differences.
LocateResult locate_zeros(const AnalyticFunction &F, const Rectangle &region,
                          const LocateOptions &opts = {});

/// Newton iteration with step 1e-6 (1 + |z|) central differences.
struct NewtonResult
{
  cplx z;
  int iterations = 0;
  bool converged = false;
};
NewtonResult newton_refine(const CachedFunction &F, cplx start, double tol, int max_iters,
                           const Rectangle *stay_inside = nullptr);

}  // namespace indefsl
