#pragma once

#include <complex>
#include <span>
#include <vector>

#include "indefsl/quadrature.hpp"

namespace indefsl
{

using cplx = std::complex<double>;

/// (1 - i) / 2. Its conjugate is (1 + i) / 2, and alpha + conj(alpha) = 1.
inline constexpr cplx kAlpha{0.5, -0.5};
inline constexpr cplx kAlphaBar{0.5, 0.5};

/// Root with Re > 0 and Im > 0 for Im lambda > 0, built from the half angle of arg(lambda).
/// Throws std::domain_error when Im lambda <= 0.
cplx principal_sqrt(cplx lambda);

/// A point of the open upper half-plane together with its principal root.
class SpectralParameter
{
public:
  explicit SpectralParameter(cplx lambda);

  [[nodiscard]] cplx lambda() const { return lambda_; }
  [[nodiscard]] cplx sqrt_lambda() const { return root_; }
  [[nodiscard]] static constexpr cplx alpha() { return kAlpha; }

  /// 2 alpha sqrt(lambda), the Wronskian of u and v.
  [[nodiscard]] cplx wronskian() const { return 2.0 * kAlpha * root_; }

private:
  cplx lambda_;
  cplx root_;
};

struct KernelValue
{
  cplx c_part;
  cplx d_part;
  cplx total;
};

/// Kernel of the free resolvent (B0 - lambda)^{-1}, split as C + D. D vanishes when x and y
/// have opposite signs. |total| <= |lambda|^{-1/2}.
KernelValue kernel(const SpectralParameter &sp, double x, double y);

struct SolutionValue
{
  cplx value;
  cplx derivative;
};

/// u decays at +infinity: exp(i sqrt(lambda) x) for x >= 0.
SolutionValue solution_u(const SpectralParameter &sp, double x);

/// v decays at -infinity: exp(sqrt(lambda) x) for x < 0.
SolutionValue solution_v(const SpectralParameter &sp, double x);

/// u v' - u' v evaluated at x; equals 2 alpha sqrt(lambda) for every x.
cplx wronskian(const SpectralParameter &sp, double x);

/// (B0 - lambda)^{-1} g at the grid nodes for g sampled at the nodes (zero outside the grid).
/// Prefix and suffix integrals are accumulated panel by panel with the spectral integration
/// matrix of the panel rule, so the cost is O(N * order).
/// Throws std::domain_error when 0 lies strictly inside a panel.
std::vector<cplx> apply_resolvent(const SpectralParameter &sp, const CompositeGrid &grid,
                                  std::span<const cplx> g);

/// Same operator evaluated at arbitrary points of the grid interval; g is interpolated with
/// the panel polynomial inside the panel containing each point.
std::vector<cplx> apply_resolvent_at(const SpectralParameter &sp, const CompositeGrid &grid,
                                     std::span<const cplx> g, std::span<const double> points);

}  // namespace indefsl
